//! Reachability cones of thermodynamic state transformations.
//!
//! Given an energy spectrum and an inverse temperature, the states reachable
//! from (or able to reach) a given probability vector under thermal
//! operations form cones in the probability simplex, characterized by
//! dominance of Gibbs-rescaled cumulative curves.  This crate provides:
//!
//! - the order predicates and curves themselves ([`simplex`]),
//! - the majorisation join and the embedding lattice that restores the join
//!   at finite temperature ([`lattice`]),
//! - explicit cone polytopes: future-cone vertices, per-chamber past
//!   polytopes, tangent vectors, and the incomparable region ([`cones`]),
//! - probabilistic (guaranteed-probability) cones ([`prob`]),
//! - exact, closed-form, and Monte Carlo cone volumes ([`volumes`]),
//! - eigenvalue sampling for subsystem spectra of random pure states
//!   ([`sampling`]) and entanglement-cone volume estimation
//!   ([`entanglement`]),
//! - two-level (qubit) cones with coherence, under thermal operations and
//!   under the larger class that preserves only the thermal state
//!   ([`qubit`]),
//! - small-dimension convex-geometry utilities ([`geometry`]) and report
//!   types ([`report`]).

pub mod cones;
pub mod entanglement;
pub mod error;
pub mod geometry;
pub mod lattice;
pub mod prob;
pub mod qubit;
pub mod report;
pub mod sampling;
pub mod simplex;
pub mod tol;
pub mod volumes;

pub use error::{Result, ThermoconeError};
pub use simplex::{
    beta_order, classify, majorises, thermo_curve, thermomajorises, Beta, BetaOrder, ConeClass,
    GibbsContext, LorenzCurve, ProbVector,
};
