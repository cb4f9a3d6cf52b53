//! The majorisation join and the embedding lattice.
//!
//! Plain majorisation (uniform Gibbs weights) forms a lattice: any two
//! states have a least upper bound, computed here as the least concave
//! majorant of the pointwise maximum of Lorenz curves.  Thermomajorisation
//! at finite β is not a lattice on the simplex, but it embeds into a larger
//! lattice over a fixed grid: the 2^d − 1 subset sums of the Gibbs weights.
//! Embedded vectors carry a mass per grid segment; joins are taken on the
//! grid and projected back into any chosen chamber.
//!
//! Grid bookkeeping is done with subset bitmasks, never by comparing
//! floating-point coordinates, so projecting an embedded state back onto
//! its own chamber recovers the original entries bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ThermoconeError};
use crate::simplex::{beta_order, BetaOrder, GibbsContext, LorenzCurve, ProbVector};
use crate::tol::{TOL_CURVE, TOL_SUM};

/// Largest base dimension for which the 2^d − 1 segment grid is built.
pub const MAX_EMBED_DIM: usize = 12;

/// Slack used when comparing segment slopes during flattening.
const SLOPE_EPS: f64 = 1e-14;

/// Negative slack tolerated in embedded masses (rounding from curve
/// differencing on narrow segments).
const TOL_MASS: f64 = 1e-9;

/// The embedding grid of a Gibbs context: every non-empty subset sum of the
/// Gibbs weights, sorted ascending (ties by subset cardinality, then by the
/// subset's ascending index list).  Entry `k` covers the segment from grid
/// value `k − 1` (or 0) to grid value `k`.
#[derive(Debug, Clone)]
pub struct EmbeddingGrid {
    values: Vec<f64>,
    widths: Vec<f64>,
    subsets: Vec<u32>,
    position: Vec<usize>,
    dim_base: usize,
}

/// Lexicographic comparison of two equal-cardinality subsets given as
/// bitmasks, matching comparison of their ascending index lists.
fn subset_lex_cmp(mut a: u32, mut b: u32) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    while a != 0 && b != 0 {
        let ta = a.trailing_zeros();
        let tb = b.trailing_zeros();
        match ta.cmp(&tb) {
            Ordering::Equal => {
                a &= a - 1;
                b &= b - 1;
            }
            other => return other,
        }
    }
    a.count_ones().cmp(&b.count_ones())
}

impl EmbeddingGrid {
    /// Builds the grid for `ctx`; dimensions above [`MAX_EMBED_DIM`] are
    /// rejected (the grid has 2^d − 1 segments).
    pub fn new(ctx: &GibbsContext) -> Result<Self> {
        let d = ctx.dim();
        if d > MAX_EMBED_DIM {
            return Err(ThermoconeError::DimensionGuard {
                dim: d,
                max: MAX_EMBED_DIM,
                what: "embedding grid",
            });
        }
        let gamma = ctx.gamma();
        let mut entries: Vec<(f64, u32)> = (1u32..(1u32 << d))
            .map(|mask| {
                let mut s = 0.0;
                for (i, &g) in gamma.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        s += g;
                    }
                }
                (s, mask)
            })
            .collect();
        entries.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("finite subset sums")
                .then(a.1.count_ones().cmp(&b.1.count_ones()))
                .then_with(|| subset_lex_cmp(a.1, b.1))
        });
        let mut values: Vec<f64> = entries.iter().map(|e| e.0).collect();
        let subsets: Vec<u32> = entries.iter().map(|e| e.1).collect();
        // The full set is the unique maximum (largest value; on ties the
        // largest cardinality sorts last); pin its sum to exactly 1.
        *values.last_mut().expect("non-empty grid") = 1.0;
        let mut widths = Vec::with_capacity(values.len());
        let mut prev = 0.0;
        for &v in &values {
            widths.push(v - prev);
            prev = v;
        }
        let mut position = vec![usize::MAX; 1 << d];
        for (k, &mask) in subsets.iter().enumerate() {
            position[mask as usize] = k;
        }
        Ok(Self {
            values,
            widths,
            subsets,
            position,
            dim_base: d,
        })
    }

    /// Grid values (right segment edges), ascending, last exactly 1.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Segment widths (consecutive differences of grid values).
    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// Subset bitmask of each grid entry (bit `i` = physical level `i`).
    pub fn subsets(&self) -> &[u32] {
        &self.subsets
    }

    /// Number of grid segments, 2^d − 1.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True only for a zero-dimensional grid (never constructed).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Base dimension d.
    pub fn dim_base(&self) -> usize {
        self.dim_base
    }

    /// Grid position of a subset bitmask.
    pub fn position_of(&self, mask: u32) -> usize {
        self.position[mask as usize]
    }

    /// Embeds a state: masses are the increments of the state's
    /// thermomajorisation curve across consecutive grid values.
    ///
    /// Segment masses between the β-order prefix positions are laid down by
    /// linear interpolation; each prefix segment receives the remainder,
    /// adjusted by at most a few ulps so that summing the range back in
    /// order reproduces the original entry exactly (see [`Self::project`]).
    pub fn embed(&self, p: &ProbVector, ctx: &GibbsContext) -> Result<EmbeddedVector> {
        ctx.check_dim(self.dim_base)?;
        ctx.check_dim(p.dim())?;
        let order = beta_order(p, ctx)?;
        let pop = p.entries();
        let mut masses = vec![0.0; self.values.len()];
        let mut prefix: u32 = 0;
        let mut begin = 0usize;
        let mut x_start = 0.0;
        for &level in order.perm() {
            prefix |= 1 << level;
            let end = self.position[prefix as usize];
            let pk = pop[level];
            let x_end = self.values[end];
            let width = x_end - x_start;
            let mut y_prev = 0.0; // curve height relative to the range start
            for k in begin..end {
                let dx = self.values[k] - x_start;
                let mut y = if width > 0.0 && dx > 0.0 {
                    pk * (dx / width)
                } else {
                    0.0
                };
                if y > pk {
                    y = pk;
                }
                if y < y_prev {
                    y = y_prev;
                }
                masses[k] = y - y_prev;
                y_prev = y;
            }
            close_range(&mut masses, begin, end, pk);
            begin = end + 1;
            x_start = x_end;
        }
        EmbeddedVector::new(masses, self.widths.clone(), self.dim_base)
    }

    /// Projects an embedded vector onto the chamber `pi`: entry `pi[k]`
    /// receives the total mass between the (k−1)-th and k-th prefix of π.
    ///
    /// Prefix positions are looked up by bitmask, so no floating-point
    /// coordinate comparison is involved; projecting an embedded state onto
    /// its own β-order chamber returns the original entries bitwise.
    pub fn project(&self, v: &EmbeddedVector, pi: &BetaOrder) -> Result<ProbVector> {
        if v.dim_emb() != self.len() || pi.dim() != self.dim_base {
            return Err(ThermoconeError::DimensionMismatch {
                left: v.dim_emb(),
                right: self.len(),
            });
        }
        let mut out = vec![0.0; self.dim_base];
        let mut prefix: u32 = 0;
        let mut begin = 0usize;
        for &level in pi.perm() {
            prefix |= 1 << level;
            let end = self.position[prefix as usize];
            let mut acc = 0.0;
            for mass in &v.masses[begin..=end] {
                acc += mass;
            }
            out[level] = acc;
            begin = end + 1;
        }
        ProbVector::new(out)
    }
}

/// One ulp step of `x` toward positive or negative infinity.
fn ulp_step(x: f64, toward_positive: bool) -> f64 {
    if x == 0.0 {
        let tiny = f64::from_bits(1);
        return if toward_positive { tiny } else { -tiny };
    }
    let bits = x.to_bits();
    let moving_away_from_zero = (x > 0.0) == toward_positive;
    f64::from_bits(if moving_away_from_zero {
        bits + 1
    } else {
        bits - 1
    })
}

/// The remainder `m` with `partial + m` rounding exactly to `target`,
/// starting from the naive difference and walking by ulps if rounding
/// lands a neighbour off.  `None` when no such remainder exists (the sum
/// lattice can step straight over `target` under round-to-nearest-even).
fn remainder_hitting(partial: f64, target: f64) -> Option<f64> {
    let mut m = target - partial;
    for _ in 0..64 {
        let got = partial + m;
        if got == target {
            return Some(m);
        }
        m = ulp_step(m, got < target);
    }
    None
}

/// Fills `masses[end]` so the in-order sum over `begin..=end` reproduces
/// `target` bitwise.  When round-to-nearest-even makes `target` unreachable
/// from the exact partial sum (the sum lattice skips an odd-mantissa
/// target), a one-ulp nudge of an earlier mass shifts the lattice by a
/// fraction of an ulp and restores reachability.
fn close_range(masses: &mut [f64], begin: usize, end: usize, target: f64) {
    let sum_range = |ms: &[f64]| {
        let mut acc = 0.0;
        for &m in ms {
            acc += m;
        }
        acc
    };
    let partial = sum_range(&masses[begin..end]);
    if let Some(m) = remainder_hitting(partial, target) {
        masses[end] = m;
        return;
    }
    for j in (begin..end).rev() {
        let original = masses[j];
        for toward_positive in [true, false] {
            let nudged = ulp_step(original, toward_positive);
            if nudged < 0.0 {
                continue;
            }
            masses[j] = nudged;
            let partial = sum_range(&masses[begin..end]);
            if let Some(m) = remainder_hitting(partial, target) {
                masses[end] = m;
                return;
            }
        }
        masses[j] = original;
    }
    masses[end] = target - partial;
}

/// A vector in the embedding lattice: one mass per grid segment.
///
/// Cumulative masses over the grid form a concave curve for embedded states
/// and joins (segment slopes mass/width non-increasing); zero-width
/// segments carry zero mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedVector {
    masses: Vec<f64>,
    widths: Vec<f64>,
    dim_base: usize,
}

impl EmbeddedVector {
    /// Validates segment counts and normalization.
    pub fn new(masses: Vec<f64>, widths: Vec<f64>, dim_base: usize) -> Result<Self> {
        let expect = (1usize << dim_base) - 1;
        if masses.len() != expect || widths.len() != expect {
            return Err(ThermoconeError::DimensionMismatch {
                left: masses.len(),
                right: expect,
            });
        }
        for (index, &m) in masses.iter().enumerate() {
            if !m.is_finite() || m < -TOL_MASS {
                return Err(ThermoconeError::NegativeEntry {
                    index,
                    value: m,
                    min: -TOL_MASS,
                });
            }
        }
        let sum: f64 = masses.iter().sum();
        if (sum - 1.0).abs() > TOL_SUM {
            return Err(ThermoconeError::NotNormalized { sum, tol: TOL_SUM });
        }
        Ok(Self {
            masses,
            widths,
            dim_base,
        })
    }

    /// Segment masses.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Segment widths (shared with the grid that produced the vector).
    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// Base dimension d (the grid has 2^d − 1 segments).
    pub fn dim_base(&self) -> usize {
        self.dim_base
    }

    /// Number of grid segments.
    pub fn dim_emb(&self) -> usize {
        self.masses.len()
    }

    /// Cumulative masses at each grid value.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.masses
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect()
    }

    /// True when segment slopes (mass/width on positive-width segments) are
    /// non-increasing within tolerance — the shape invariant of embedded
    /// states and joins.
    pub fn is_grid_concave(&self) -> bool {
        let mut prev = f64::INFINITY;
        for (m, w) in self.masses.iter().zip(self.widths.iter()) {
            if *w <= 1e-15 {
                continue;
            }
            let s = m / w;
            if s > prev + 1e-9 * (1.0 + prev.abs()) {
                return false;
            }
            prev = s;
        }
        true
    }
}

/// Embeds `p` into the lattice over `ctx`'s grid.
pub fn embed(p: &ProbVector, ctx: &GibbsContext) -> Result<EmbeddedVector> {
    EmbeddingGrid::new(ctx)?.embed(p, ctx)
}

/// Projects `v` onto chamber `pi` of `ctx`'s grid.
pub fn project(v: &EmbeddedVector, pi: &BetaOrder, ctx: &GibbsContext) -> Result<ProbVector> {
    EmbeddingGrid::new(ctx)?.project(v, pi)
}

/// Lattice order on a shared grid: `a` dominates `b` when the cumulative
/// masses of `a` reach at least those of `b` at every grid value.
pub fn majorises_embedded(a: &EmbeddedVector, b: &EmbeddedVector) -> Result<bool> {
    check_same_grid(a, b)?;
    let ca = a.cumulative();
    let cb = b.cumulative();
    Ok(ca
        .iter()
        .zip(cb.iter())
        .all(|(x, y)| *x >= *y - TOL_CURVE))
}

fn check_same_grid(a: &EmbeddedVector, b: &EmbeddedVector) -> Result<()> {
    if a.dim_emb() != b.dim_emb() {
        return Err(ThermoconeError::DimensionMismatch {
            left: a.dim_emb(),
            right: b.dim_emb(),
        });
    }
    let same = a
        .widths
        .iter()
        .zip(b.widths.iter())
        .all(|(x, y)| (x - y).abs() <= 1e-15);
    if !same {
        return Err(ThermoconeError::InvalidParameter {
            name: "widths",
            message: "embedded vectors live on different grids".into(),
        });
    }
    Ok(())
}

/// Flattens every point of slope increase out of the cumulative curve of
/// `masses` over `widths` (all positive), producing the least concave
/// majorant in place.  One step fully eliminates the first increase point:
/// the offending block is grown backward while the left neighbour's slope
/// is below the block average and forward while the right neighbour's is
/// above, then replaced by its average slope.  Returns the step count.
pub(crate) fn flatten_increases(masses: &mut [f64], widths: &[f64]) -> usize {
    let n = masses.len();
    let mut slope: Vec<f64> = masses.iter().zip(widths).map(|(m, w)| m / w).collect();
    let mut steps = 0;
    loop {
        let mut first = None;
        for i in 1..n {
            if slope[i] > slope[i - 1] + SLOPE_EPS {
                first = Some(i);
                break;
            }
        }
        let Some(first) = first else {
            break;
        };
        let mut lo = first - 1;
        let mut hi = first;
        loop {
            let mass_sum: f64 = masses[lo..=hi].iter().sum();
            let width_sum: f64 = widths[lo..=hi].iter().sum();
            let avg = mass_sum / width_sum;
            if lo > 0 && slope[lo - 1] < avg - SLOPE_EPS {
                lo -= 1;
                continue;
            }
            if hi + 1 < n && slope[hi + 1] > avg - SLOPE_EPS {
                hi += 1;
                continue;
            }
            for k in lo..=hi {
                masses[k] = avg * widths[k];
                slope[k] = avg;
            }
            break;
        }
        steps += 1;
    }
    steps
}

/// Least concave majorant by direct upper convex hull (monotone chain) of
/// the cumulative points; used to cross-check the flattening route.
pub(crate) fn upper_hull_masses(masses: &[f64], widths: &[f64]) -> Vec<f64> {
    let n = masses.len();
    let mut xs = vec![0.0; n + 1];
    let mut ys = vec![0.0; n + 1];
    for i in 0..n {
        xs[i + 1] = xs[i] + widths[i];
        ys[i + 1] = ys[i] + masses[i];
    }
    let mut hull: Vec<usize> = vec![0];
    for i in 1..=n {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b when it lies on or below the segment a -> i
            if (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let elbows: Vec<(f64, f64)> = hull.iter().map(|&k| (xs[k], ys[k])).collect();
    let curve = LorenzCurve::from_elbows(elbows);
    let mut out = Vec::with_capacity(n);
    let mut prev = 0.0;
    for &x in xs.iter().skip(1) {
        let y = curve.eval(x);
        out.push(y - prev);
        prev = y;
    }
    out
}

/// The majorisation join of two states (uniform Gibbs weights): the least
/// state (up to permutation, returned sorted non-increasingly) majorising
/// both.  Also returns the number of flattening steps used, which never
/// exceeds d − 1.
pub fn join_uniform(p: &ProbVector, q: &ProbVector) -> Result<(ProbVector, usize)> {
    if p.dim() != q.dim() {
        return Err(ThermoconeError::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let d = p.dim();
    let sa = p.sorted_desc();
    let sb = q.sorted_desc();
    let mut masses = Vec::with_capacity(d);
    let (mut ca, mut cb, mut prev) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..d {
        ca += sa[i];
        cb += sb[i];
        let m = ca.max(cb);
        masses.push(m - prev);
        prev = m;
    }
    let widths = vec![1.0; d];
    let raw = masses.clone();
    let steps = flatten_increases(&mut masses, &widths);
    let hull = upper_hull_masses(&raw, &widths);
    debug_assert!(
        masses
            .iter()
            .zip(hull.iter())
            .all(|(a, b)| (a - b).abs() < 1e-10),
        "flattening disagrees with the direct upper hull"
    );
    Ok((ProbVector::new(masses)?, steps))
}

/// The lattice join of two embedded vectors on a shared grid: the least
/// concave majorant of the pointwise maximum of their cumulative curves.
/// Returns the join and the flattening step count (at most the number of
/// positive-width segments minus one).
pub fn join_embedded(a: &EmbeddedVector, b: &EmbeddedVector) -> Result<(EmbeddedVector, usize)> {
    check_same_grid(a, b)?;
    let n = a.dim_emb();
    let widths = &a.widths;
    let ca = a.cumulative();
    let cb = b.cumulative();

    // Cumulative points of the pointwise maximum, with zero-width runs
    // compressed (keeping the larger cumulative at a duplicated x).
    let mut xs = vec![0.0; n + 1];
    for i in 0..n {
        xs[i + 1] = xs[i] + widths[i];
    }
    let mut ux = vec![0.0f64];
    let mut uy = vec![0.0f64];
    for i in 1..=n {
        let y = ca[i - 1].max(cb[i - 1]);
        if xs[i] - ux.last().unwrap() > 1e-15 {
            ux.push(xs[i]);
            uy.push(y);
        } else if let Some(last) = uy.last_mut() {
            if y > *last {
                *last = y;
            }
        }
    }
    let segments = ux.len() - 1;
    let mut seg_w = Vec::with_capacity(segments);
    let mut seg_m = Vec::with_capacity(segments);
    for i in 0..segments {
        seg_w.push(ux[i + 1] - ux[i]);
        seg_m.push(uy[i + 1] - uy[i]);
    }
    let raw = seg_m.clone();
    let steps = flatten_increases(&mut seg_m, &seg_w);
    let hull = upper_hull_masses(&raw, &seg_w);
    debug_assert!(
        seg_m
            .iter()
            .zip(hull.iter())
            .all(|(a, b)| (a - b).abs() < 1e-10),
        "embedded flattening disagrees with the direct upper hull"
    );

    // Expand back to the full grid: read the flattened cumulative at every
    // grid value (zero-width segments receive zero mass).
    let mut elbows = Vec::with_capacity(segments + 1);
    let mut acc = 0.0;
    elbows.push((ux[0], 0.0));
    for i in 0..segments {
        acc += seg_m[i];
        elbows.push((ux[i + 1], acc));
    }
    let curve = LorenzCurve::from_elbows(elbows);
    let mut out = Vec::with_capacity(n);
    let mut prev = 0.0;
    for &x in xs.iter().skip(1) {
        let y = curve.eval(x);
        out.push(y - prev);
        prev = y;
    }
    Ok((EmbeddedVector::new(out, widths.clone(), a.dim_base)?, steps))
}
