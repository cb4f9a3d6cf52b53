//! Coherent thermal cones for a two-level system.
//!
//! A qubit state is a Bloch vector; in the energy eigenbasis it reads
//! rho = [[p, c], [c, 1-p]] with ground population p = (1+z)/2 and (real,
//! non-negative without loss of generality) coherence c = x/2.  The bath
//! fixes a thermal z-coordinate zeta in [0, 1), i.e. ground occupation
//! gamma = (1+zeta)/2 >= 1/2.
//!
//! Two operation classes are covered.  Thermal operations (energy
//! conserving, thermal ancillas): a target (q, d) is reachable from
//! (p, c) when its population lies in the classical window between p and
//! the swap image 1 - p(1-gamma)/gamma and its coherence obeys
//! |d| <= c sqrt(F)/|p-gamma| with
//! F = [q(1-gamma) - gamma(1-p)] [p(1-gamma) - gamma(1-q)]; the past is
//! the exact role swap of that test.  Gibbs-preserving operations (the
//! larger class): two radii R± = delta ± zeta z with
//! delta = sqrt((z-zeta)² + (x²+y²)(1-zeta²)) are monotones, and the
//! future cone is the intersection of two disks read off from them.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ThermoconeError};
use crate::simplex::ConeClass;
use crate::tol::{POLYLINE_POINTS, TOL_BISECT};

/// Populations this close to the thermal one are treated as degenerate
/// (the coherence bound divides by |p − γ|).
const TOL_DEGENERATE: f64 = 1e-15;

/// Slack for population-window and coherence-bound membership.
const TOL_MEMBER: f64 = 1e-12;

/// A Bloch vector (x, y, z) with norm at most 1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BlochState {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochState {
    /// Validates the Bloch-ball constraint x² + y² + z² ≤ 1.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm2 = x * x + y * y + z * z;
        if !(norm2 <= 1.0 + 1e-12) {
            return Err(ThermoconeError::InvalidParameter {
                name: "bloch",
                message: format!("Bloch vector norm {} exceeds 1", norm2.sqrt()),
            });
        }
        Ok(Self { x, y, z })
    }

    /// Builds the state with ground population `p` and real coherence `c`
    /// (x = 2c, y = 0, z = 2p − 1).
    pub fn from_population_coherence(p: f64, c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ThermoconeError::InvalidParameter {
                name: "population",
                message: format!("population must lie in [0, 1], got {p}"),
            });
        }
        Self::new(2.0 * c, 0.0, 2.0 * p - 1.0)
    }

    /// X coordinate.
    pub fn x(&self) -> f64 {
        self.x
    }

    /// Y coordinate.
    pub fn y(&self) -> f64 {
        self.y
    }

    /// Z coordinate.
    pub fn z(&self) -> f64 {
        self.z
    }

    /// The same state rotated about the z axis into the XZ plane
    /// (coherence phase is irrelevant to both operation classes).
    pub fn rotate_to_xz(&self) -> Self {
        Self {
            x: self.x.hypot(self.y),
            y: 0.0,
            z: self.z,
        }
    }

    /// Ground population and coherence magnitude, phase discarded.
    fn population_coherence_magnitude(&self) -> (f64, f64) {
        ((1.0 + self.z) / 2.0, self.x.hypot(self.y) / 2.0)
    }
}

/// The thermal fixed point of a two-level bath: Bloch vector (0, 0, ζ).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QubitThermalContext {
    zeta: f64,
    gamma_ground: f64,
}

impl QubitThermalContext {
    /// Validates ζ ∈ [0, 1); ζ = 1 (zero temperature) is rejected as the
    /// cone formulas divide by 1 − ζ².
    pub fn new(zeta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&zeta) {
            return Err(ThermoconeError::InvalidParameter {
                name: "zeta",
                message: format!("thermal z-coordinate must lie in [0, 1), got {zeta}"),
            });
        }
        Ok(Self {
            zeta,
            gamma_ground: (1.0 + zeta) / 2.0,
        })
    }

    /// Builds from the ground occupation γ ∈ [1/2, 1).
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        Self::new(2.0 * gamma - 1.0)
    }

    /// Thermal z-coordinate ζ = 2γ − 1.
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Thermal ground occupation γ = (1 + ζ)/2.
    pub fn gamma_ground(&self) -> f64 {
        self.gamma_ground
    }
}

/// Ground population and coherence of an XZ-plane Bloch state:
/// p = (1 + z)/2 and c = x/2.  States with a y component must be rotated
/// into the plane first.
pub fn to_population_coherence(s: &BlochState) -> Result<(f64, f64)> {
    if s.y().abs() > 1e-12 {
        return Err(ThermoconeError::InvalidParameter {
            name: "bloch",
            message: "state has a y component; rotate into the XZ plane first".into(),
        });
    }
    Ok(((1.0 + s.z()) / 2.0, s.x() / 2.0))
}

/// The population reached by exhausting the bath swap: 1 − p(1−γ)/γ.
/// Together with p it bounds the classically reachable window.
pub fn swap_population(p: f64, ctx: &QubitThermalContext) -> f64 {
    let g = ctx.gamma_ground();
    1.0 - p * (1.0 - g) / g
}

/// The symmetric quadratic F(p, q) whose square root bounds coherence
/// transport between populations p and q.
fn coherence_quadratic(p: f64, q: f64, g: f64) -> f64 {
    (q * (1.0 - g) - g * (1.0 - p)) * (p * (1.0 - g) - g * (1.0 - q))
}

/// Largest target coherence reachable at population `q` from source
/// (p, c): c·√F/|p−γ|.  `None` when the population itself is unreachable.
/// A source at the thermal population can only hold its population,
/// keeping coherence up to c.
pub fn to_max_target_coherence(
    p: f64,
    c: f64,
    ctx: &QubitThermalContext,
    q: f64,
) -> Option<f64> {
    let g = ctx.gamma_ground();
    let c = c.abs();
    if (p - g).abs() < TOL_DEGENERATE {
        return if (q - g).abs() < TOL_MEMBER {
            Some(c)
        } else {
            None
        };
    }
    let sw = swap_population(p, ctx);
    let (lo, hi) = (p.min(sw), p.max(sw));
    if q < lo - TOL_MEMBER || q > hi + TOL_MEMBER {
        return None;
    }
    let f = coherence_quadratic(p, q, g);
    Some(c * f.max(0.0).sqrt() / (p - g).abs())
}

/// Smallest source coherence at population `q` able to reach (p, c):
/// c·|q−γ|/√F.  `None` when no source with population `q` can reach the
/// target at all (window or F excludes it).
pub fn to_min_source_coherence(
    p: f64,
    c: f64,
    ctx: &QubitThermalContext,
    q: f64,
) -> Option<f64> {
    let g = ctx.gamma_ground();
    let c = c.abs();
    if (q - g).abs() < TOL_DEGENERATE {
        return if (p - g).abs() < TOL_MEMBER {
            Some(c)
        } else {
            None
        };
    }
    let sw = swap_population(q, ctx);
    let (lo, hi) = (q.min(sw), q.max(sw));
    if p < lo - TOL_MEMBER || p > hi + TOL_MEMBER {
        return None;
    }
    let f = coherence_quadratic(q, p, g);
    if f <= 0.0 {
        return None;
    }
    Some(c * (q - g).abs() / f.sqrt())
}

/// Is the target population/coherence pair reachable from (p, c) under
/// thermal operations?
pub fn to_future_contains(p: f64, c: f64, ctx: &QubitThermalContext, q: f64, d: f64) -> bool {
    match to_max_target_coherence(p, c, ctx, q) {
        Some(dm) => d.abs() <= dm + TOL_MEMBER,
        None => false,
    }
}

/// Can the source population/coherence pair (q, d) reach (p, c) under
/// thermal operations?  Exactly the role swap of the future test.
pub fn to_past_contains(p: f64, c: f64, ctx: &QubitThermalContext, q: f64, d: f64) -> bool {
    to_future_contains(q, d.abs(), ctx, p, c)
}

/// Classifies `target` against the thermal-operation cones of `source`.
/// Coherence phases are discarded (both states are rotated into the XZ
/// plane), which is without loss of generality for this operation class.
pub fn to_classify(
    source: &BlochState,
    target: &BlochState,
    ctx: &QubitThermalContext,
) -> ConeClass {
    let (p, c) = source.population_coherence_magnitude();
    let (q, d) = target.population_coherence_magnitude();
    let fwd = to_future_contains(p, c, ctx, q, d);
    let bwd = to_past_contains(p, c, ctx, q, d);
    match (fwd, bwd) {
        (true, true) => ConeClass::Equivalent,
        (true, false) => ConeClass::Future,
        (false, true) => ConeClass::Past,
        (false, false) => ConeClass::Incomparable,
    }
}

/// Bisection for a root of `f` between a non-positive end and a
/// non-negative end (in either geometric order).
fn bisect(f: impl Fn(f64) -> f64, mut neg: f64, mut pos: f64) -> f64 {
    for _ in 0..200 {
        if (pos - neg).abs() <= TOL_BISECT {
            break;
        }
        let mid = 0.5 * (neg + pos);
        if f(mid) >= 0.0 {
            pos = mid;
        } else {
            neg = mid;
        }
    }
    0.5 * (neg + pos)
}

/// The thermal-operation future region of one source state: the
/// population window, the boundary curve q₁(d) sampled at the requested
/// coherences, and the membership data needed to test points directly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToFutureBoundary {
    /// Source ground population p.
    pub source_population: f64,
    /// Source coherence magnitude c.
    pub source_coherence: f64,
    /// Bath ground occupation γ.
    pub gamma: f64,
    /// Swap population 1 − p(1−γ)/γ (the zero-coherence end of the window).
    pub swap_population: f64,
    /// Boundary samples (d, q₁(d)): at coherence d the reachable
    /// populations span q₁(d) to p.
    pub points: Vec<(f64, f64)>,
}

/// Samples the future-boundary curve q₁(d) of `s` at each coherence in
/// `d_targets` (each must lie in [0, c]).  The future region is bounded
/// by this curve, its x → −x mirror, and the segment from (−c, p) to
/// (c, p).  For a source at the thermal population the region collapses
/// to the coherence-decaying segment q = γ.
pub fn to_future_boundary(
    s: &BlochState,
    ctx: &QubitThermalContext,
    d_targets: &[f64],
) -> Result<ToFutureBoundary> {
    let (p, c) = to_population_coherence(&s.rotate_to_xz())?;
    let g = ctx.gamma_ground();
    let sw = swap_population(p, ctx);
    let mut points = Vec::with_capacity(d_targets.len());
    for &d in d_targets {
        if !(0.0..=c + TOL_MEMBER).contains(&d) {
            return Err(ThermoconeError::InvalidParameter {
                name: "d_targets",
                message: format!("boundary coherence {d} outside [0, {c}]"),
            });
        }
        let d = d.min(c);
        let q1 = if (p - g).abs() < TOL_DEGENERATE {
            g
        } else if c == 0.0 {
            sw
        } else {
            // d_max is 0 at the swap population and c at p, monotone on
            // the window between them
            bisect(
                |q| to_max_target_coherence(p, c, ctx, q).unwrap_or(-1.0) - d,
                sw,
                p,
            )
        };
        points.push((d, q1));
    }
    Ok(ToFutureBoundary {
        source_population: p,
        source_coherence: c,
        gamma: g,
        swap_population: sw,
        points,
    })
}

/// The thermal-operation past region of one source state: up to two
/// disjoint pieces, each a population window [q_lo, q_hi] on which the
/// minimum source coherence d₂(q) stays below the Bloch-ball purity bound
/// √(q(1−q)).  Piece 1 contains the source itself (d₂(p) = c); piece 2
/// sits on the other side of the thermal population and may be empty.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToPastRegion {
    /// Target (the region's apex) ground population p.
    pub source_population: f64,
    /// Target coherence magnitude c.
    pub source_coherence: f64,
    /// Bath ground occupation γ.
    pub gamma: f64,
    /// Where the future boundary meets the Bloch circle: √(p(1−p)).
    pub d_cross: f64,
    /// Population window of the piece containing the source.
    pub piece1_window: (f64, f64),
    /// Boundary samples (q, d₂(q)) across piece 1.
    pub piece1_boundary: Vec<(f64, f64)>,
    /// Population window of the detached piece, if it exists.
    pub piece2_window: Option<(f64, f64)>,
    /// Boundary samples (q, d₂(q)) across piece 2 (empty when absent).
    pub piece2_boundary: Vec<(f64, f64)>,
}

impl ToPastRegion {
    /// Membership test for a source candidate (q, d), by the role-swapped
    /// future test (independent of the sampled polylines).
    pub fn contains(&self, ctx: &QubitThermalContext, q: f64, d: f64) -> bool {
        to_past_contains(self.source_population, self.source_coherence, ctx, q, d)
    }
}

/// Computes the past region of `s` under thermal operations.  Boundary
/// polylines carry `POLYLINE_POINTS` samples each.
pub fn to_past_region(s: &BlochState, ctx: &QubitThermalContext) -> Result<ToPastRegion> {
    let (p, c) = to_population_coherence(&s.rotate_to_xz())?;
    let g = ctx.gamma_ground();
    let d_cross = (p * (1.0 - p)).sqrt();
    let purity = |q: f64| (q * (1.0 - q)).sqrt();
    // excess of the minimum source coherence over the purity bound:
    // negative exactly where sources exist
    let excess = |q: f64| match to_min_source_coherence(p, c, ctx, q) {
        Some(d2) => d2 - purity(q),
        None => f64::INFINITY,
    };

    // --- piece 1: the side of the thermal population containing p ---
    // d2(p) = c <= purity(p), and d2 grows toward the pure end until it
    // leaves the Bloch ball
    let pure_end = if p >= g { 1.0 } else { 0.0 };
    let piece1_window = if (p - g).abs() < TOL_DEGENERATE {
        (g, g)
    } else {
        let mut end = pure_end;
        if excess(pure_end - (pure_end - p) * 1e-9) > 0.0 {
            end = bisect(|q| -excess(q), pure_end, p);
        }
        (p.min(end), p.max(end))
    };
    let piece1_boundary = sample_boundary(piece1_window, |q| {
        to_min_source_coherence(p, c, ctx, q).unwrap_or(f64::NAN)
    });

    // --- piece 2: the opposite side of the thermal population ---
    // its population window is limited by p's membership in the source's
    // classical window; beyond that F <= 0 and no coherence suffices
    let q_pop = g * (1.0 - p) / (1.0 - g);
    let (scan_lo, scan_hi) = if p >= g {
        (0.0, q_pop.min(1.0))
    } else {
        (q_pop.max(0.0), 1.0)
    };
    let piece2_window = find_negative_window(excess, scan_lo, scan_hi);
    let piece2_boundary = match piece2_window {
        Some(w) => sample_boundary(w, |q| {
            to_min_source_coherence(p, c, ctx, q).unwrap_or(f64::NAN)
        }),
        None => Vec::new(),
    };

    Ok(ToPastRegion {
        source_population: p,
        source_coherence: c,
        gamma: g,
        d_cross,
        piece1_window,
        piece1_boundary,
        piece2_window,
        piece2_boundary,
    })
}

/// Evenly samples (q, f(q)) across a window.
fn sample_boundary(window: (f64, f64), f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let (lo, hi) = window;
    let n = POLYLINE_POINTS;
    (0..n)
        .map(|i| {
            let q = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            (q, f(q))
        })
        .collect()
}

/// Finds the (single) interval inside (lo, hi) where `f` is negative, by
/// grid scan plus bisection on the sign changes.  Returns `None` when `f`
/// never dips below zero on the open interval.
fn find_negative_window(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    if !(hi > lo) {
        return None;
    }
    const SCAN: usize = 1024;
    let at = |i: usize| lo + (hi - lo) * i as f64 / SCAN as f64;
    let mut first_neg = None;
    let mut last_neg = None;
    for i in 1..SCAN {
        if f(at(i)) < 0.0 {
            if first_neg.is_none() {
                first_neg = Some(i);
            }
            last_neg = Some(i);
        }
    }
    let (i0, i1) = (first_neg?, last_neg?);
    let left = bisect(&f, at(i0), at(i0 - 1));
    let right = bisect(&f, at(i1), at(i1 + 1));
    Some((left.min(right), left.max(right)))
}

/// The Gibbs-preserving cones of one source state: the two monotone radii
/// R± = δ ± ζz, the disks they carve out of the Bloch ball's XZ section,
/// and membership classification.  The future cone is the intersection of
/// the two disks; states inside exactly one disk are incomparable; the
/// rest of the ball is the past.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GpCones {
    /// Thermal z-coordinate ζ.
    pub zeta: f64,
    /// δ(ρ) = √((z−ζ)² + (x²+y²)(1−ζ²)) of the source.
    pub delta: f64,
    /// Monotone radius R₋ = δ − ζz.
    pub r_minus: f64,
    /// Monotone radius R₊ = δ + ζz.
    pub r_plus: f64,
    /// Radius of disk 1: (R₋ + ζ²)/(1 − ζ²).
    pub r1: f64,
    /// Radius of disk 2: (R₊ − ζ²)/(1 − ζ²).
    pub r2: f64,
    /// Disk-1 centre z-coordinate: ζ(1 + R₁).
    pub centre1_z: f64,
    /// Disk-2 centre z-coordinate: ζ(1 − R₂).
    pub centre2_z: f64,
    /// Disk-1 boundary circle as (x, z) samples.
    pub circle1: Vec<(f64, f64)>,
    /// Disk-2 boundary circle as (x, z) samples.
    pub circle2: Vec<(f64, f64)>,
}

/// The pair (R₋, R₊) of a Bloch state.
pub fn gp_radii(s: &BlochState, ctx: &QubitThermalContext) -> (f64, f64) {
    let zeta = ctx.zeta();
    let planar2 = s.x() * s.x() + s.y() * s.y();
    let delta = ((s.z() - zeta).powi(2) + planar2 * (1.0 - zeta * zeta)).sqrt();
    (delta - zeta * s.z(), delta + zeta * s.z())
}

/// Builds the Gibbs-preserving cones of `s`.
pub fn gp_cones(s: &BlochState, ctx: &QubitThermalContext) -> Result<GpCones> {
    let zeta = ctx.zeta();
    let (r_minus, r_plus) = gp_radii(s, ctx);
    let planar2 = s.x() * s.x() + s.y() * s.y();
    let delta = ((s.z() - zeta).powi(2) + planar2 * (1.0 - zeta * zeta)).sqrt();
    let denom = 1.0 - zeta * zeta;
    let r1 = (r_minus + zeta * zeta) / denom;
    let r2 = (r_plus - zeta * zeta) / denom;
    let centre1_z = zeta * (1.0 + r1);
    let centre2_z = zeta * (1.0 - r2);
    let circle = |centre: f64, radius: f64| -> Vec<(f64, f64)> {
        (0..POLYLINE_POINTS)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / POLYLINE_POINTS as f64;
                (radius * t.sin(), centre + radius * t.cos())
            })
            .collect()
    };
    Ok(GpCones {
        zeta,
        delta,
        r_minus,
        r_plus,
        r1,
        r2,
        centre1_z,
        centre2_z,
        circle1: circle(centre1_z, r1),
        circle2: circle(centre2_z, r2),
    })
}

impl GpCones {
    /// Classifies a target against this source's cones: both radii
    /// non-increasing means reachable (future), both non-decreasing means
    /// the target can reach the source (past), mixed means incomparable.
    pub fn classify(&self, target: &BlochState, ctx: &QubitThermalContext) -> ConeClass {
        let (tm, tp) = gp_radii(target, ctx);
        let eq = (self.r_minus - tm).abs() <= TOL_MEMBER && (self.r_plus - tp).abs() <= TOL_MEMBER;
        if eq {
            return ConeClass::Equivalent;
        }
        let fwd = self.r_minus >= tm - TOL_MEMBER && self.r_plus >= tp - TOL_MEMBER;
        let bwd = tm >= self.r_minus - TOL_MEMBER && tp >= self.r_plus - TOL_MEMBER;
        match (fwd, bwd) {
            (true, true) => ConeClass::Equivalent,
            (true, false) => ConeClass::Future,
            (false, true) => ConeClass::Past,
            (false, false) => ConeClass::Incomparable,
        }
    }

    /// Is the (x, z) point inside disk 1?
    pub fn in_disk1(&self, x: f64, z: f64) -> bool {
        x.hypot(z - self.centre1_z) <= self.r1 + TOL_MEMBER
    }

    /// Is the (x, z) point inside disk 2?
    pub fn in_disk2(&self, x: f64, z: f64) -> bool {
        x.hypot(z - self.centre2_z) <= self.r2 + TOL_MEMBER
    }
}
