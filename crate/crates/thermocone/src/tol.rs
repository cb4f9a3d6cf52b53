//! Numerical tolerances used across the crate.
//!
//! Every construction here is closed-form arithmetic over the inputs
//! (sorting, cumulative sums, linear interpolation, quadratic roots), so the
//! tolerances only have to absorb floating-point rounding, never truncation
//! error of an iterative scheme.

/// Absolute tolerance for "entries sum to one" checks.
pub const TOL_SUM: f64 = 1e-9;

/// Entries of a quasi-probability vector may undershoot zero by this much.
pub const TOL_NEG: f64 = 1e-12;

/// Curve dominance `f_a >= f_b` is accepted when the pointwise difference
/// stays above `-TOL_CURVE` at every checked coordinate.
pub const TOL_CURVE: f64 = 1e-12;

/// Two polytope vertices are considered identical when every coordinate
/// agrees within this tolerance.
pub const TOL_DEDUP: f64 = 1e-10;

/// Bisection width for qubit boundary crossings.
pub const TOL_BISECT: f64 = 1e-12;

/// Default number of points on an exported boundary polyline.
pub const POLYLINE_POINTS: usize = 1024;

/// Default Monte-Carlo sample count.
pub const MC_DEFAULT_SAMPLES: usize = 1_000_000;
