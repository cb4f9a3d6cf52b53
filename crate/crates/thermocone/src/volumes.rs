//! Relative volumes of the future, past and incomparable regions — the
//! fraction of the probability simplex each region occupies.
//!
//! Three routes are provided: closed-form polynomials for three-level
//! systems against a flat bath, exact convex-hull volumes built from the
//! cone extreme points, and Monte-Carlo classification of uniform simplex
//! samples.  Sweeps over inverse temperature and barycentric grids for
//! contour plots are layered on top.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cones::{future_cone, past_chamber_vertices, permutations, MAX_PAST_DIM};
use crate::error::{Result, ThermoconeError};
use crate::geometry::{factorial, ConvexHull};
use crate::simplex::{beta_order, classify, Beta, BetaOrder, ConeClass, GibbsContext, ProbVector};
use crate::tol::MC_DEFAULT_SAMPLES;

/// Largest dimension for which the exact future-cone hull volume is offered.
pub const MAX_EXACT_FUTURE_DIM: usize = 6;

/// Fewest Monte-Carlo samples accepted (below this the binomial error is
/// too large to be meaningful).
pub const MIN_MC_SAMPLES: usize = 1_000;

/// Samples per worker block.  Each block owns one counter-mode RNG stream,
/// so estimates are bit-identical for a fixed seed regardless of the
/// number of worker threads.
const MC_BLOCK: usize = 16_384;

/// Tiny negative volumes produced by floating-point cancellation are
/// clamped to zero; anything below this is a real error.
const TOL_VOLUME: f64 = 1e-9;

/// How the volumes in a [`VolumeReport`] were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VolumeMethod {
    /// Degree-two polynomial formulas (three levels, flat bath).
    ClosedForm,
    /// Convex-hull volumes of the cone extreme points.
    ExactHull,
    /// Frequencies of classified uniform simplex samples.
    MonteCarlo,
}

/// The relative volumes of the three regions around a state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolumeReport {
    /// Fraction of the simplex reachable from the state.
    pub v_future: f64,
    /// Fraction of the simplex that can reach the state.
    pub v_past: f64,
    /// Fraction neither reachable nor able to reach.
    pub v_incomparable: f64,
    /// How the numbers were computed.
    pub method: VolumeMethod,
    /// Sample count (Monte-Carlo only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    /// Worst-case binomial standard error (Monte-Carlo only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

impl VolumeReport {
    fn exact(v_future: f64, v_past: f64, method: VolumeMethod) -> Result<Self> {
        let v_incomparable = 1.0 - v_future - v_past;
        Self::from_parts(v_future, v_past, v_incomparable, method)
    }

    fn from_parts(
        v_future: f64,
        v_past: f64,
        v_incomparable: f64,
        method: VolumeMethod,
    ) -> Result<Self> {
        let sum = v_future + v_past + v_incomparable;
        if (sum - 1.0).abs() > TOL_VOLUME {
            return Err(ThermoconeError::Numerical {
                context: "volume partition",
                message: format!("regions sum to {sum}, not 1"),
            });
        }
        let clamp = |v: f64| -> Result<f64> {
            if v < -TOL_VOLUME {
                return Err(ThermoconeError::Numerical {
                    context: "volume partition",
                    message: format!("negative region volume {v}"),
                });
            }
            Ok(v.clamp(0.0, 1.0))
        };
        Ok(Self {
            v_future: clamp(v_future)?,
            v_past: clamp(v_past)?,
            v_incomparable: clamp(v_incomparable)?,
            method,
            samples: None,
            std_error: None,
        })
    }
}

/// Relative volume of the convex hull of `vertices`, measured in the first
/// d−1 coordinates and normalized by the simplex volume 1/(d−1)!.
fn relative_volume(vertices: &[ProbVector], d: usize) -> Result<f64> {
    if vertices.len() < d {
        return Ok(0.0);
    }
    if d == 2 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in vertices {
            lo = lo.min(v.entries()[0]);
            hi = hi.max(v.entries()[0]);
        }
        return Ok(hi - lo);
    }
    let pts: Vec<Vec<f64>> = vertices.iter().map(|v| v.entries()[..d - 1].to_vec()).collect();
    let hull = ConvexHull::build(&pts, d - 1)?;
    Ok(hull.volume() * factorial(d - 1))
}

/// Closed-form volumes for a three-level state against a flat bath
/// (uniform fixed point): quadratic polynomials in the sorted entries,
/// with a step term that switches when the largest entry crosses 1/2.
pub fn closed_form_d3(p: &ProbVector) -> Result<VolumeReport> {
    if p.dim() != 3 {
        return Err(ThermoconeError::DimensionGuard {
            dim: p.dim(),
            max: 3,
            what: "closed-form volumes (exactly three levels)",
        });
    }
    let s = p.sorted_desc();
    let v_future = (3.0 * s[0] - 1.0).powi(2) - 3.0 * (s[1] - s[0]).powi(2);
    let theta = if s[0] < 0.5 { 1.0 } else { 0.0 };
    let v_past = 12.0 * s[1] * s[2] - 3.0 * theta * (1.0 - 2.0 * s[0]).powi(2);
    let v_incomparable = 1.0 - 3.0 * (1.0 - s[0]).powi(2) + (1.0 - 3.0 * s[2]).powi(2)
        - 2.0 * v_future
        + 3.0 * theta * (1.0 - 2.0 * s[0]).powi(2);
    VolumeReport::from_parts(v_future, v_past, v_incomparable, VolumeMethod::ClosedForm)
}

/// Exact relative volume of the future cone (dimension ≤ 6) as the hull of
/// its extreme points.  Up to dimension 4 the past volume is also exact —
/// the sum of the per-chamber hull volumes — and the incomparable fraction
/// is the remainder.  In dimensions 5 and 6 the past entry falls back to a
/// fixed-seed Monte-Carlo estimate (the `std_error` field reports its
/// binomial error); the future entry stays exact.
pub fn exact_future_volume(p: &ProbVector, ctx: &GibbsContext) -> Result<VolumeReport> {
    ctx.check_dim(p.dim())?;
    let d = p.dim();
    if d > MAX_EXACT_FUTURE_DIM {
        return Err(ThermoconeError::DimensionGuard {
            dim: d,
            max: MAX_EXACT_FUTURE_DIM,
            what: "exact future-cone volume",
        });
    }
    let cone = future_cone(p, ctx)?;
    let v_future = relative_volume(cone.vertices(), d)?;
    if d <= MAX_PAST_DIM {
        let v_past = exact_past_fraction(p, ctx)?;
        VolumeReport::exact(v_future, v_past, VolumeMethod::ExactHull)
    } else {
        let mc = mc_volumes(p, ctx, MC_DEFAULT_SAMPLES, 0)?;
        let mut report = VolumeReport::exact(v_future, mc.v_past.min(1.0 - v_future), VolumeMethod::ExactHull)?;
        report.samples = mc.samples;
        report.std_error = mc.std_error;
        Ok(report)
    }
}

/// Exact past volume: per-chamber hull volumes summed over all distinct
/// chambers (generically the chambers tile the past cone with disjoint
/// interiors; degenerate Gibbs weights — equal energies, or the zero
/// weights of the ground-collapsed limit — make several permutations
/// yield the same polytope, so identical vertex sets are counted once).
fn exact_past_fraction(p: &ProbVector, ctx: &GibbsContext) -> Result<f64> {
    let d = p.dim();
    let mut total = 0.0;
    let mut seen: Vec<Vec<Vec<i64>>> = Vec::new();
    for perm in permutations(d) {
        let chamber = BetaOrder::from_perm(perm)?;
        let verts = past_chamber_vertices(p, ctx, &chamber)?;
        let mut signature: Vec<Vec<i64>> = verts
            .iter()
            .map(|v| v.entries().iter().map(|x| (x / 1e-9).round() as i64).collect())
            .collect();
        signature.sort();
        if seen.contains(&signature) {
            continue;
        }
        seen.push(signature);
        total += relative_volume(&verts, d)?;
    }
    if total > 1.0 + TOL_VOLUME {
        return Err(ThermoconeError::Numerical {
            context: "past volume",
            message: format!("chamber volumes sum to {total} > 1"),
        });
    }
    Ok(total.min(1.0))
}

/// One uniform sample from the probability simplex: normalized exponential
/// variates (a flat Dirichlet draw).
pub fn dirichlet_sample<R: Rng>(rng: &mut R, d: usize) -> ProbVector {
    loop {
        let mut e: Vec<f64> = (0..d).map(|_| -f64::ln_1p(-rng.gen::<f64>())).collect();
        let sum: f64 = e.iter().sum();
        if sum > 1e-300 {
            for v in e.iter_mut() {
                *v /= sum;
            }
            if let Ok(p) = ProbVector::new(e) {
                return p;
            }
        }
    }
}

/// Monte-Carlo volumes: classify `n` uniform simplex samples against `p`
/// and report the class frequencies.  Samples are drawn in fixed-size
/// blocks, each block on its own stream of a counter-mode generator, so a
/// given seed yields bit-identical results at any worker-thread count.
/// Samples equivalent to `p` count as future (they are reachable).
pub fn mc_volumes(p: &ProbVector, ctx: &GibbsContext, n: usize, seed: u64) -> Result<VolumeReport> {
    ctx.check_dim(p.dim())?;
    if n < MIN_MC_SAMPLES {
        return Err(ThermoconeError::InvalidParameter {
            name: "samples",
            message: format!("need at least {MIN_MC_SAMPLES} samples, got {n}"),
        });
    }
    let d = p.dim();
    let blocks = n.div_ceil(MC_BLOCK);
    let counts = (0..blocks)
        .into_par_iter()
        .map(|b| -> Result<[u64; 3]> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let lo = b * MC_BLOCK;
            let hi = n.min(lo + MC_BLOCK);
            let mut c = [0u64; 3];
            for _ in lo..hi {
                let q = dirichlet_sample(&mut rng, d);
                match classify(&q, p, ctx)? {
                    ConeClass::Future | ConeClass::Equivalent => c[0] += 1,
                    ConeClass::Past => c[1] += 1,
                    ConeClass::Incomparable => c[2] += 1,
                }
            }
            Ok(c)
        })
        .try_reduce(
            || [0u64; 3],
            |a, b| Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2]]),
        )?;
    let nf = n as f64;
    let v_future = counts[0] as f64 / nf;
    let v_past = counts[1] as f64 / nf;
    let v_incomparable = counts[2] as f64 / nf;
    let se = [v_future, v_past, v_incomparable]
        .iter()
        .map(|v| (v * (1.0 - v) / nf).sqrt())
        .fold(0.0f64, f64::max);
    let mut report =
        VolumeReport::from_parts(v_future, v_past, v_incomparable, VolumeMethod::MonteCarlo)?;
    report.samples = Some(n as u64);
    report.std_error = Some(se);
    Ok(report)
}

/// Volumes of one permutation of the swept state at one inverse temperature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepEntry {
    /// The permutation applied to the base state (entry i holds base index).
    pub permutation: Vec<usize>,
    /// The permuted state itself.
    pub state: Vec<f64>,
    /// Exact volumes of its three regions.
    pub report: VolumeReport,
}

/// All permutations of the swept state at one inverse temperature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    /// Inverse temperature of this row.
    pub beta: f64,
    /// The base state's chamber (order of decreasing rescaled population).
    pub beta_order: Vec<usize>,
    /// True when the chamber changed relative to the previous grid point —
    /// the volume curves kink at these temperatures.
    pub kink: bool,
    /// One entry per permutation of the base state.
    pub entries: Vec<SweepEntry>,
}

/// Exact volumes of `p` and all its permutations across a list of inverse
/// temperatures, with chamber-change (kink) flags on the base state.
pub fn volume_sweep(p: &ProbVector, energies: &[f64], betas: &[f64]) -> Result<Vec<SweepRow>> {
    let d = p.dim();
    if d > MAX_PAST_DIM {
        return Err(ThermoconeError::DimensionGuard {
            dim: d,
            max: MAX_PAST_DIM,
            what: "exact volume sweep",
        });
    }
    if energies.len() != d {
        return Err(ThermoconeError::DimensionMismatch {
            left: energies.len(),
            right: d,
        });
    }
    let perms = permutations(d);
    let mut rows = Vec::with_capacity(betas.len());
    let mut prev_order: Option<Vec<usize>> = None;
    for &beta in betas {
        if !beta.is_finite() || beta < 0.0 {
            return Err(ThermoconeError::InvalidParameter {
                name: "betas",
                message: format!("sweep temperatures must be finite and non-negative, got {beta}"),
            });
        }
        let ctx = GibbsContext::new(energies.to_vec(), Beta::Finite(beta))?;
        let order = beta_order(p, &ctx)?.perm().to_vec();
        let kink = prev_order.as_ref().is_some_and(|prev| *prev != order);
        prev_order = Some(order.clone());
        let mut entries = Vec::with_capacity(perms.len());
        for perm in &perms {
            let state: Vec<f64> = perm.iter().map(|&i| p.entries()[i]).collect();
            let q = ProbVector::new(state.clone())?;
            let report = exact_future_volume(&q, &ctx)?;
            entries.push(SweepEntry {
                permutation: perm.clone(),
                state,
                report,
            });
        }
        rows.push(SweepRow {
            beta,
            beta_order: order,
            kink,
            entries,
        });
    }
    Ok(rows)
}

/// One barycentric grid state and its region volumes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridRow {
    /// The grid state (three barycentric coordinates).
    pub state: [f64; 3],
    /// Its region volumes (closed form on a flat bath, exact hulls else).
    pub report: VolumeReport,
}

/// Region volumes on the regular barycentric grid of resolution `res`
/// over the three-level simplex: states (i, j, k)/res with i+j+k = res.
/// Uses the closed form when the fixed point is uniform and exact hulls
/// otherwise.
pub fn isovolumetric_grid(ctx: &GibbsContext, resolution: usize) -> Result<Vec<GridRow>> {
    if ctx.dim() != 3 {
        return Err(ThermoconeError::DimensionGuard {
            dim: ctx.dim(),
            max: 3,
            what: "isovolumetric grid (exactly three levels)",
        });
    }
    if resolution < 1 {
        return Err(ThermoconeError::InvalidParameter {
            name: "resolution",
            message: "grid resolution must be at least 1".into(),
        });
    }
    let g = ctx.gibbs().entries();
    let flat_bath = g.iter().all(|&v| (v - g[0]).abs() < 1e-15);
    let r = resolution as f64;
    let mut rows = Vec::new();
    for i in 0..=resolution {
        for j in 0..=(resolution - i) {
            let k = resolution - i - j;
            let state = [i as f64 / r, j as f64 / r, k as f64 / r];
            let p = ProbVector::new(state.to_vec())?;
            let report = if flat_bath {
                closed_form_d3(&p)?
            } else {
                exact_future_volume(&p, ctx)?
            };
            rows.push(GridRow { state, report });
        }
    }
    Ok(rows)
}
