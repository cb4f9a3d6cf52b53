//! Probability vectors, Gibbs contexts, β-ordering, and the
//! (thermo)majorisation curves and predicates built on them.
//!
//! The partial order implemented here compares piecewise-linear concave
//! curves: state `p` dominates state `q` when the curve of `p` lies on or
//! above the curve of `q` everywhere.  At infinite inverse temperature the
//! Gibbs weights of excited levels vanish and the curves acquire a vertical
//! riser at the origin; evaluation takes the supremum there and dominance
//! additionally compares left limits, which keeps the predicate exact.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ThermoconeError};
use crate::tol::{TOL_CURVE, TOL_NEG, TOL_SUM};

/// A d-dimensional probability vector.
///
/// Entries may undershoot zero by at most `TOL_NEG` (rounding slack from
/// curve differencing); anything more negative is rejected.  Use
/// [`ProbVector::sorted_desc`] for the non-increasing rearrangement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector {
    entries: Vec<f64>,
}

impl ProbVector {
    /// Validates and wraps `entries`: the sum must be 1 within `TOL_SUM` and
    /// every entry at least `-TOL_NEG`.  Entries inside the negative slack
    /// are clamped to exactly zero.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(ThermoconeError::InvalidParameter {
                name: "entries",
                message: "probability vector must have at least one entry".into(),
            });
        }
        let sum: f64 = entries.iter().sum();
        if !(sum - 1.0).abs().is_finite() || (sum - 1.0).abs() > TOL_SUM {
            return Err(ThermoconeError::NotNormalized { sum, tol: TOL_SUM });
        }
        for (index, &value) in entries.iter().enumerate() {
            if !value.is_finite() || value < -TOL_NEG {
                return Err(ThermoconeError::NegativeEntry {
                    index,
                    value,
                    min: -TOL_NEG,
                });
            }
        }
        let entries = entries
            .into_iter()
            .map(|v| if v < 0.0 { 0.0 } else { v })
            .collect();
        Ok(Self { entries })
    }

    /// The uniform state η = (1/d, ..., 1/d).
    pub fn uniform(dim: usize) -> Self {
        Self {
            entries: vec![1.0 / dim as f64; dim],
        }
    }

    /// The sharp state with all mass on `level`.
    pub fn sharp(dim: usize, level: usize) -> Self {
        let mut entries = vec![0.0; dim];
        entries[level] = 1.0;
        Self { entries }
    }

    /// Number of entries.
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Entries in physical (energy-level) order.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Entries rearranged non-increasingly.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut s = self.entries.clone();
        s.sort_by(|a, b| b.partial_cmp(a).expect("finite entries"));
        s
    }

    /// Euclidean distance to another vector of the same dimension.
    pub fn distance(&self, other: &ProbVector) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Inverse temperature: a non-negative real or the infinite limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Beta {
    /// Finite β ≥ 0 (β = 0 is the uniform / infinite-temperature point).
    Finite(f64),
    /// The β → ∞ limit: Gibbs weight collapses onto the ground level(s).
    Infinite,
}

impl Beta {
    /// Parses a β value; accepts decimal strings and `inf`/`infinity`.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.eq_ignore_ascii_case("inf") || trimmed.eq_ignore_ascii_case("infinity") {
            return Ok(Beta::Infinite);
        }
        let value: f64 = trimmed
            .parse()
            .map_err(|_| ThermoconeError::InvalidParameter {
                name: "beta",
                message: format!("cannot parse {trimmed:?} as a number or \"inf\""),
            })?;
        Beta::finite(value)
    }

    /// Wraps a finite value, rejecting negatives and non-finite floats.
    pub fn finite(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(ThermoconeError::InvalidBeta { beta: value });
        }
        Ok(Beta::Finite(value))
    }

    /// True for the infinite limit.
    pub fn is_infinite(&self) -> bool {
        matches!(self, Beta::Infinite)
    }
}

impl std::fmt::Display for Beta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Beta::Finite(v) => write!(f, "{v}"),
            Beta::Infinite => write!(f, "inf"),
        }
    }
}

/// An energy spectrum with an inverse temperature and the derived Gibbs
/// distribution γ_i = e^(−β E_i) / Z.
///
/// Energies are internally measured from the ground level, so the stored
/// partition function is Z = Σ_i e^(−β (E_i − E_min)); the Gibbs vector is
/// unaffected by that shift.  At β = ∞ the Gibbs weight is split uniformly
/// over the exact ground set and Z equals the ground multiplicity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GibbsContext {
    energies: Vec<f64>,
    beta: Beta,
    gibbs: ProbVector,
    partition: f64,
}

impl GibbsContext {
    /// Builds the context, deriving the Gibbs state and partition function.
    pub fn new(energies: Vec<f64>, beta: Beta) -> Result<Self> {
        if energies.is_empty() {
            return Err(ThermoconeError::InvalidParameter {
                name: "energies",
                message: "energy list must be non-empty".into(),
            });
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(ThermoconeError::InvalidParameter {
                name: "energies",
                message: "energies must be finite".into(),
            });
        }
        let e_min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        let (weights, partition) = match beta {
            Beta::Finite(b) => {
                let w: Vec<f64> = energies.iter().map(|e| (-b * (e - e_min)).exp()).collect();
                let z: f64 = w.iter().sum();
                (w.iter().map(|wi| wi / z).collect::<Vec<_>>(), z)
            }
            Beta::Infinite => {
                let ground: Vec<bool> = energies.iter().map(|&e| e == e_min).collect();
                let count = ground.iter().filter(|&&g| g).count() as f64;
                (
                    ground
                        .iter()
                        .map(|&g| if g { 1.0 / count } else { 0.0 })
                        .collect(),
                    count,
                )
            }
        };
        let gibbs = ProbVector::new(weights).expect("gibbs weights normalize by construction");
        Ok(Self {
            energies,
            beta,
            gibbs,
            partition,
        })
    }

    /// Uniform-γ context of dimension `dim` (β = 0 over a flat spectrum);
    /// the setting in which thermomajorisation reduces to plain majorisation.
    pub fn uniform(dim: usize) -> Self {
        Self::new(vec![0.0; dim], Beta::Finite(0.0)).expect("flat spectrum is valid")
    }

    /// System dimension d.
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Energy spectrum.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Inverse temperature.
    pub fn beta(&self) -> Beta {
        self.beta
    }

    /// The Gibbs distribution as a probability vector.
    pub fn gibbs(&self) -> &ProbVector {
        &self.gibbs
    }

    /// Gibbs weights as a slice.
    pub fn gamma(&self) -> &[f64] {
        self.gibbs.entries()
    }

    /// Partition function over energies measured from the ground level.
    pub fn partition(&self) -> f64 {
        self.partition
    }

    /// Checks an operand dimension against this context.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(ThermoconeError::DimensionMismatch {
                left: dim,
                right: self.dim(),
            });
        }
        Ok(())
    }
}

/// The permutation sorting p_i/γ_i non-increasingly, with its inverse.
///
/// `perm[k]` is the physical index occupying β-position `k`; `inverse[i]` is
/// the β-position of physical index `i`.  Ties are broken by ascending
/// physical index so the order is always deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BetaOrder {
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl BetaOrder {
    /// Wraps an explicit permutation (used to target a specific chamber).
    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        let d = perm.len();
        let mut inverse = vec![usize::MAX; d];
        for (pos, &idx) in perm.iter().enumerate() {
            if idx >= d || inverse[idx] != usize::MAX {
                return Err(ThermoconeError::InvalidParameter {
                    name: "perm",
                    message: format!("{perm:?} is not a permutation of 0..{d}"),
                });
            }
            inverse[idx] = pos;
        }
        Ok(Self { perm, inverse })
    }

    /// Physical index at β-position `k`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// β-position of physical index `i`.
    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    /// Dimension of the underlying state space.
    pub fn dim(&self) -> usize {
        self.perm.len()
    }
}

/// Computes the β-order of `p` in context `ctx`.
///
/// Ratios p_i/γ_i are compared by cross-multiplication (p_i γ_j vs p_j γ_i),
/// avoiding division.  At β = ∞, excited levels with positive population
/// have divergent ratios and sort first — by descending energy (the faster
/// divergence wins), then descending population, then ascending index —
/// matching the finite-β limit of the order.
pub fn beta_order(p: &ProbVector, ctx: &GibbsContext) -> Result<BetaOrder> {
    ctx.check_dim(p.dim())?;
    let d = p.dim();
    let gamma = ctx.gamma();
    let pop = p.entries();
    let energies = ctx.energies();
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&i, &j| {
        use std::cmp::Ordering;
        let diverge_i = gamma[i] == 0.0 && pop[i] > 0.0;
        let diverge_j = gamma[j] == 0.0 && pop[j] > 0.0;
        match (diverge_i, diverge_j) {
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            (true, true) => {
                return energies[j]
                    .partial_cmp(&energies[i])
                    .unwrap()
                    .then(pop[j].partial_cmp(&pop[i]).unwrap())
                    .then(i.cmp(&j));
            }
            (false, false) => {}
        }
        let lhs = pop[i] * gamma[j];
        let rhs = pop[j] * gamma[i];
        rhs.partial_cmp(&lhs)
            .unwrap()
            // Both cross-products zero can still hide a strict inequality
            // (positive ratio vs zero ratio); positive population wins.
            .then((pop[j] > 0.0).cmp(&(pop[i] > 0.0)))
            .then(i.cmp(&j))
    });
    let order = BetaOrder::from_perm(idx).expect("sorted indices form a permutation");
    Ok(order)
}

/// A piecewise-linear non-decreasing concave curve through (0,0) and (1,1),
/// stored as its ordered elbow list.
///
/// Proper states yield y ∈ [0,1]; tangent constructions reuse the type with
/// interior y values above 1 (quasi-probability curves).  Consecutive equal
/// x-coordinates encode a vertical riser (β = ∞ curves).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorenzCurve {
    elbows: Vec<(f64, f64)>,
}

impl LorenzCurve {
    /// Wraps a pre-built elbow list without validating concavity; the
    /// callers inside this crate construct elbow lists that are concave by
    /// cumulative-sum construction.
    pub(crate) fn from_elbows(elbows: Vec<(f64, f64)>) -> Self {
        Self { elbows }
    }

    /// The elbow points, starting at (0,0).
    pub fn elbows(&self) -> &[(f64, f64)] {
        &self.elbows
    }

    /// Curve value at `x`, taking the supremum on vertical risers.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_directed(x, true)
    }

    /// Left limit at `x` (equals `eval` away from risers).
    pub fn eval_left(&self, x: f64) -> f64 {
        self.eval_directed(x, false)
    }

    fn eval_directed(&self, x: f64, sup: bool) -> f64 {
        let pts = &self.elbows;
        let n = pts.len();
        if x <= pts[0].0 {
            return if sup {
                // climb the initial riser if one exists at x
                let mut y = pts[0].1;
                for &(px, py) in pts.iter() {
                    if px <= x {
                        y = py;
                    } else {
                        break;
                    }
                }
                y
            } else {
                pts[0].1
            };
        }
        if x >= pts[n - 1].0 {
            return pts[n - 1].1;
        }
        // rightmost elbow with x-coordinate <= x (sup) or leftmost (left limit)
        let mut lo = 0usize;
        let mut hi = n - 1;
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if pts[mid].0 <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if sup {
            while lo + 1 < n && pts[lo + 1].0 <= x {
                lo += 1;
            }
        } else {
            while lo > 0 && pts[lo - 1].0 >= x {
                lo -= 1;
            }
        }
        let (x0, y0) = pts[lo];
        let (x1, y1) = pts[lo + 1];
        if x1 == x0 {
            return if sup { y1.max(y0) } else { y0.min(y1) };
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// True when `self` lies on or above `other` everywhere, within the
    /// curve tolerance.  Both curves are piecewise linear, so dominance at
    /// the union of elbow x-coordinates (supremum values and left limits)
    /// is exact.
    pub fn dominates(&self, other: &LorenzCurve) -> bool {
        let mut xs: Vec<f64> = self
            .elbows
            .iter()
            .chain(other.elbows.iter())
            .map(|&(x, _)| x)
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        xs.into_iter().all(|x| {
            self.eval(x) >= other.eval(x) - TOL_CURVE
                && self.eval_left(x) >= other.eval_left(x) - TOL_CURVE
        })
    }
}

/// Builds the thermomajorisation curve of `p`: elbows at the cumulative
/// Gibbs weights of the β-ordered levels with cumulative populations as
/// heights.  At β = 0 this is the plain majorisation (Lorenz) curve.
pub fn thermo_curve(p: &ProbVector, ctx: &GibbsContext) -> Result<LorenzCurve> {
    let order = beta_order(p, ctx)?;
    Ok(curve_in_chamber(p, ctx, &order))
}

/// The curve of `p` read in an explicit chamber `pi` (cumulative sums taken
/// in π-order).  For π equal to p's own β-order this is the
/// thermomajorisation curve; other chambers generally produce non-concave
/// polylines, used by the lattice projections.
pub fn curve_in_chamber(p: &ProbVector, ctx: &GibbsContext, pi: &BetaOrder) -> LorenzCurve {
    let gamma = ctx.gamma();
    let pop = p.entries();
    let mut elbows = Vec::with_capacity(p.dim() + 1);
    let mut x = 0.0;
    let mut y = 0.0;
    elbows.push((0.0, 0.0));
    for &i in pi.perm() {
        x += gamma[i];
        y += pop[i];
        elbows.push((x, y));
    }
    // Guard against cumulative rounding at the endpoint.
    if let Some(last) = elbows.last_mut() {
        last.0 = 1.0;
        last.1 = 1.0;
    }
    LorenzCurve::from_elbows(elbows)
}

/// True when `p` thermomajorises `q` (curve of `p` dominates curve of `q`).
pub fn thermomajorises(p: &ProbVector, q: &ProbVector, ctx: &GibbsContext) -> Result<bool> {
    let fp = thermo_curve(p, ctx)?;
    let fq = thermo_curve(q, ctx)?;
    Ok(fp.dominates(&fq))
}

/// Plain majorisation `p ≻ q` (β = 0, uniform-γ shortcut).
pub fn majorises(p: &ProbVector, q: &ProbVector) -> Result<bool> {
    if p.dim() != q.dim() {
        return Err(ThermoconeError::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let ctx = GibbsContext::uniform(p.dim());
    thermomajorises(p, q, &ctx)
}

/// Position of a state relative to a reference state's thermal cones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeClass {
    /// Reachable from the reference state.
    Future,
    /// Able to reach the reference state.
    Past,
    /// Neither reachable nor able to reach.
    Incomparable,
    /// Mutually reachable (equal curves).
    Equivalent,
}

impl std::fmt::Display for ConeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ConeClass::Future => "future",
            ConeClass::Past => "past",
            ConeClass::Incomparable => "incomparable",
            ConeClass::Equivalent => "equivalent",
        };
        write!(f, "{name}")
    }
}

/// Classifies `q` relative to the cones of `p`: `Future` when p ≻_β q only,
/// `Past` when q ≻_β p only, `Equivalent` when both, `Incomparable` when
/// neither.
pub fn classify(q: &ProbVector, p: &ProbVector, ctx: &GibbsContext) -> Result<ConeClass> {
    let fp = thermo_curve(p, ctx)?;
    let fq = thermo_curve(q, ctx)?;
    let forward = fp.dominates(&fq);
    let backward = fq.dominates(&fp);
    Ok(match (forward, backward) {
        (true, true) => ConeClass::Equivalent,
        (true, false) => ConeClass::Future,
        (false, true) => ConeClass::Past,
        (false, false) => ConeClass::Incomparable,
    })
}
