//! Thermal-cone constructions: tangent vectors, the future cone as an
//! explicit polytope, per-chamber past polytopes, the incomparable region as
//! a union of convex pieces, and the elementary β-swap operation.
//!
//! The future cone of a state is the convex hull of at most d! vertices,
//! one per permutation of the Gibbs weights, read off the state's curve.
//! The past cone is generally non-convex but decomposes into one convex
//! polytope per β-order chamber, enumerated here from its defining
//! inequalities.  The incomparable region is covered by hulls of pairs of
//! consecutive tangent future cones; the tangent curves involved are
//! quasi-probability curves (their last mass may be negative) and must not
//! be clipped — clipping shrinks the hull union and misclassifies points
//! near the boundary.

use crate::error::{Result, ThermoconeError};
use crate::geometry::ConvexHull;
use crate::simplex::{
    beta_order, thermo_curve, BetaOrder, ConeClass, GibbsContext, LorenzCurve, ProbVector,
};
use crate::tol::TOL_DEDUP;

/// Largest dimension for permutation-enumeration constructions (d! growth).
pub const MAX_CONE_DIM: usize = 8;

/// Largest dimension for exact past-cone vertex enumeration
/// (C(3d−2, d−1) candidate intersections per chamber).
pub const MAX_PAST_DIM: usize = 4;

/// Deduplication tolerance for past-cone vertices (looser than the curve
/// tolerance: vertices come from solved linear systems).
const TOL_PAST_DEDUP: f64 = 1e-8;

/// Acceptance slack when checking solved intersection points against the
/// chamber inequalities.
const TOL_HREP: f64 = 1e-9;

/// All permutations of 0..d in a deterministic order.
pub(crate) fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..d).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(d, &mut items, &mut out);
    out
}

/// All k-element index subsets of 0..n in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// A tangent vector: a quasi-probability direction touching a state's curve
/// at consecutive elbows.  Entries are stored in physical order; at most the
/// chamber's last entry can be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    entries: Vec<f64>,
    level: usize,
    chamber: BetaOrder,
}

impl TangentVector {
    /// Wraps an explicit tangent (entries in physical order, summing to 1).
    pub fn new(entries: Vec<f64>, level: usize, chamber: BetaOrder) -> Result<Self> {
        if entries.len() != chamber.dim() {
            return Err(ThermoconeError::DimensionMismatch {
                left: entries.len(),
                right: chamber.dim(),
            });
        }
        Ok(Self {
            entries,
            level,
            chamber,
        })
    }

    /// Entries in physical order (may contain a negative value).
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// The touching level n (1-based: the tangent touches elbows n−1 and n).
    pub fn level(&self) -> usize {
        self.level
    }

    /// The chamber whose grid the tangent lives on.
    pub fn chamber(&self) -> &BetaOrder {
        &self.chamber
    }

    /// The tangent's entry sequence in chamber order.
    pub fn chamber_sequence(&self) -> Vec<f64> {
        self.chamber.perm().iter().map(|&i| self.entries[i]).collect()
    }
}

/// A convex cone piece: a set of extreme points with the cone kind and,
/// for past pieces, the chamber it belongs to.
#[derive(Debug, Clone)]
pub struct ConePolytope {
    kind: ConeClass,
    chamber: Option<BetaOrder>,
    vertices: Vec<ProbVector>,
}

impl ConePolytope {
    /// Which cone this polytope belongs to.
    pub fn kind(&self) -> ConeClass {
        self.kind
    }

    /// The chamber of a per-chamber piece (None for the full future cone).
    pub fn chamber(&self) -> Option<&BetaOrder> {
        self.chamber.as_ref()
    }

    /// Extreme points.
    pub fn vertices(&self) -> &[ProbVector] {
        &self.vertices
    }
}

/// Tangent vectors of a state under plain majorisation, one per level
/// n = 1..d: (t_1, s_n, ..., s_n, t_d) with s the sorted state,
/// t_1 = Σ_{i<n} s_i − (n−2) s_n and t_d fixed by normalization.
pub fn tangent_vectors_uniform(p: &ProbVector) -> Result<Vec<TangentVector>> {
    let d = p.dim();
    if d < 2 {
        return Err(ThermoconeError::DimensionGuard {
            dim: d,
            max: MAX_CONE_DIM,
            what: "tangent construction",
        });
    }
    let s = p.sorted_desc();
    let identity = BetaOrder::from_perm((0..d).collect())?;
    let mut out = Vec::with_capacity(d);
    for n in 1..=d {
        let sn = s[n - 1];
        let head: f64 = s[..n - 1].iter().sum();
        let t1 = head - (n as f64 - 2.0) * sn;
        let td = 1.0 - t1 - (d as f64 - 2.0) * sn;
        let mut t = vec![sn; d];
        t[0] = t1;
        t[d - 1] = td;
        out.push(TangentVector::new(t, n, identity.clone())?);
    }
    Ok(out)
}

/// The chamber-ordered entry sequence of the thermal tangent t^(n,π):
/// slope s = n-th β-ordered population/weight ratio of `p`; the first entry
/// absorbs the curve height offset, interior entries follow the slope, the
/// last entry closes the sum to 1 (and is the only one that can be
/// negative).
fn thermal_tangent_sequence(
    n: usize,
    pi: &BetaOrder,
    p_beta: &[f64],
    g_beta: &[f64],
    gamma: &[f64],
) -> Vec<f64> {
    let d = p_beta.len();
    let prefix_p: f64 = p_beta[..n].iter().sum();
    let prefix_g: f64 = g_beta[..n].iter().sum();
    let s = p_beta[n - 1] / g_beta[n - 1];
    let w: Vec<f64> = pi.perm().iter().map(|&i| gamma[i]).collect();
    let mut e = vec![0.0; d];
    e[0] = prefix_p - s * (prefix_g - w[0]);
    for i in 1..d - 1 {
        e[i] = s * w[i];
    }
    e[d - 1] = 1.0 - e[..d - 1].iter().sum::<f64>();
    e
}

/// All thermal tangent vectors of `p`: one per level n = 1..d and chamber
/// π ∈ S_d, in physical order.  Requires positive Gibbs weights (finite β).
pub fn tangent_vectors_thermal(
    p: &ProbVector,
    ctx: &GibbsContext,
) -> Result<Vec<TangentVector>> {
    ctx.check_dim(p.dim())?;
    let d = p.dim();
    if d > MAX_CONE_DIM {
        return Err(ThermoconeError::DimensionGuard {
            dim: d,
            max: MAX_CONE_DIM,
            what: "tangent construction",
        });
    }
    if ctx.beta().is_infinite() {
        return Err(ThermoconeError::InvalidParameter {
            name: "beta",
            message: "tangent construction needs positive Gibbs weights (finite beta)".into(),
        });
    }
    let gamma = ctx.gamma();
    let order = beta_order(p, ctx)?;
    let p_beta: Vec<f64> = order.perm().iter().map(|&i| p.entries()[i]).collect();
    let g_beta: Vec<f64> = order.perm().iter().map(|&i| gamma[i]).collect();
    let mut out = Vec::new();
    for perm in permutations(d) {
        let pi = BetaOrder::from_perm(perm)?;
        for n in 1..=d {
            let e = thermal_tangent_sequence(n, &pi, &p_beta, &g_beta, gamma);
            let mut t = vec![0.0; d];
            for (i, &level) in pi.perm().iter().enumerate() {
                t[level] = e[i];
            }
            out.push(TangentVector::new(t, n, pi.clone())?);
        }
    }
    Ok(out)
}

/// Folds a quasi-probability sequence onto the simplex: sweeping from the
/// last position down, a negative entry is absorbed into its predecessor
/// and replaced by zero.  Preserves the total and every non-negative prefix.
fn fold_sequence(seq: &mut [f64]) {
    for m in (1..seq.len()).rev() {
        let tail = seq[m];
        if tail < 0.0 {
            seq[m - 1] += tail;
            seq[m] = 0.0;
        }
    }
}

/// Projects a tangent vector onto the simplex by folding its (at most one)
/// negative trailing mass up the chamber order.
pub fn project_to_simplex(t: &TangentVector) -> Result<ProbVector> {
    let mut seq = t.chamber_sequence();
    fold_sequence(&mut seq);
    let mut out = vec![0.0; seq.len()];
    for (i, &level) in t.chamber().perm().iter().enumerate() {
        out[level] = seq[i];
    }
    ProbVector::new(out)
}

/// Extreme points of the future cone of a concave curve: for each
/// permutation σ, evaluate the curve at the σ-prefix Gibbs sums and assign
/// the increments to σ's levels.  Duplicates are removed.  The result may
/// contain quasi-probability points when the curve exceeds 1.
fn cone_vertices_of_curve(curve: &LorenzCurve, ctx: &GibbsContext) -> Vec<Vec<f64>> {
    let d = ctx.dim();
    let gamma = ctx.gamma();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for sigma in permutations(d) {
        let mut v = vec![0.0; d];
        let mut x = 0.0;
        let mut y_prev = 0.0;
        for (j, &level) in sigma.iter().enumerate() {
            x += gamma[level];
            if j + 1 == d {
                x = 1.0;
            }
            let y = curve.eval(x);
            v[level] = y - y_prev;
            y_prev = y;
        }
        if !out
            .iter()
            .any(|u| u.iter().zip(v.iter()).all(|(a, b)| (a - b).abs() < TOL_DEDUP))
        {
            out.push(v);
        }
    }
    out
}

/// The future cone of `p` as an explicit polytope: the convex hull of at
/// most d! vertices read off the state's curve, deduplicated.
pub fn future_cone(p: &ProbVector, ctx: &GibbsContext) -> Result<ConePolytope> {
    ctx.check_dim(p.dim())?;
    if p.dim() > MAX_CONE_DIM {
        return Err(ThermoconeError::DimensionGuard {
            dim: p.dim(),
            max: MAX_CONE_DIM,
            what: "future cone",
        });
    }
    let curve = thermo_curve(p, ctx)?;
    let raw = cone_vertices_of_curve(&curve, ctx);
    let vertices = raw
        .into_iter()
        .map(ProbVector::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(ConePolytope {
        kind: ConeClass::Future,
        chamber: None,
        vertices,
    })
}

/// The curve of the thermal tangent t^(n,π) on chamber π's grid.  This is a
/// quasi-probability curve — concave, through (0,0) and (1,1), possibly
/// exceeding 1 in between — and is deliberately left unclipped.
fn tangent_curve(
    n: usize,
    pi: &BetaOrder,
    p_beta: &[f64],
    g_beta: &[f64],
    ctx: &GibbsContext,
) -> LorenzCurve {
    let gamma = ctx.gamma();
    let e = thermal_tangent_sequence(n, pi, p_beta, g_beta, gamma);
    let d = e.len();
    let mut elbows = Vec::with_capacity(d + 1);
    elbows.push((0.0, 0.0));
    let mut x = 0.0;
    let mut y = 0.0;
    for (i, &level) in pi.perm().iter().enumerate() {
        x += gamma[level];
        y += e[i];
        if i + 1 == d {
            x = 1.0;
            y = 1.0;
        }
        elbows.push((x, y));
    }
    LorenzCurve::from_elbows(elbows)
}

/// The incomparable region of a state, represented as a union of convex
/// pieces: for every chamber π and level i, the hull of the future-cone
/// vertices of the two consecutive tangent curves t^(i,π) and t^(i+1,π).
/// Membership is tested against each piece's facet inequalities.
#[derive(Debug)]
pub struct IncomparableRegion {
    pieces: Vec<(ConvexHull, Vec<usize>, usize)>,
    dim: usize,
}

impl IncomparableRegion {
    /// Number of convex pieces, d!·(d−1).
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// True when `q` lies in the union-of-hulls region (membership within
    /// a 1e−9 facet slack, mirroring the construction tolerance).
    pub fn contains(&self, q: &ProbVector) -> bool {
        if q.dim() != self.dim {
            return false;
        }
        let x: Vec<f64> = q.entries()[..self.dim - 1].to_vec();
        self.pieces.iter().any(|(hull, _, _)| hull.contains(&x, 1e-9))
    }
}

/// Builds the hull-union region of `p` used to separate incomparable states
/// from the past cone.
pub fn incomparable_region(p: &ProbVector, ctx: &GibbsContext) -> Result<IncomparableRegion> {
    ctx.check_dim(p.dim())?;
    let d = p.dim();
    if d > MAX_CONE_DIM {
        return Err(ThermoconeError::DimensionGuard {
            dim: d,
            max: MAX_CONE_DIM,
            what: "incomparable region",
        });
    }
    if ctx.beta().is_infinite() {
        return Err(ThermoconeError::InvalidParameter {
            name: "beta",
            message: "hull-union region needs positive Gibbs weights (finite beta)".into(),
        });
    }
    let gamma = ctx.gamma();
    let order = beta_order(p, ctx)?;
    let p_beta: Vec<f64> = order.perm().iter().map(|&i| p.entries()[i]).collect();
    let g_beta: Vec<f64> = order.perm().iter().map(|&i| gamma[i]).collect();
    let mut pieces = Vec::new();
    for perm in permutations(d) {
        let pi = BetaOrder::from_perm(perm.clone())?;
        for i in 1..d {
            let ca = tangent_curve(i, &pi, &p_beta, &g_beta, ctx);
            let cb = tangent_curve(i + 1, &pi, &p_beta, &g_beta, ctx);
            let mut verts = cone_vertices_of_curve(&ca, ctx);
            verts.extend(cone_vertices_of_curve(&cb, ctx));
            let reduced: Vec<Vec<f64>> = verts
                .iter()
                .map(|v| v[..d - 1].to_vec())
                .collect();
            let hull = ConvexHull::build(&reduced, d - 1)?;
            pieces.push((hull, perm.clone(), i));
        }
    }
    Ok(IncomparableRegion { pieces, dim: d })
}

/// Classifies `q` against `p` by the cone constructions rather than by
/// curve comparison on both sides: the future test still uses `p`'s curve,
/// but a non-future `q` is declared incomparable exactly when it lies in
/// the hull-union region, and past otherwise.
pub fn classify_via_cones(
    q: &ProbVector,
    p: &ProbVector,
    ctx: &GibbsContext,
    region: &IncomparableRegion,
) -> Result<ConeClass> {
    let fp = thermo_curve(p, ctx)?;
    let fq = thermo_curve(q, ctx)?;
    let forward = fp.dominates(&fq);
    if forward {
        if fq.dominates(&fp) {
            return Ok(ConeClass::Equivalent);
        }
        return Ok(ConeClass::Future);
    }
    if region.contains(q) {
        return Ok(ConeClass::Incomparable);
    }
    Ok(ConeClass::Past)
}

/// Solves the d×d system M q = rhs by Gaussian elimination with partial
/// pivoting; returns None when (numerically) singular.
fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = m.len();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Vertices of the past-cone restriction to chamber π: the polytope of
/// states in that chamber whose curves dominate `p`'s curve.
///
/// Inequalities: d positivity rows, d−1 adjacent ratio-order rows for the
/// chamber, and d−1 dominance rows (the chamber curve evaluated at each of
/// `p`'s interior elbows must reach `p`'s height there).  Vertices are all
/// feasible intersections of d−1 inequality rows with the normalization
/// plane.
pub fn past_chamber_vertices(
    p: &ProbVector,
    ctx: &GibbsContext,
    pi: &BetaOrder,
) -> Result<Vec<ProbVector>> {
    ctx.check_dim(p.dim())?;
    let d = p.dim();
    if d > MAX_PAST_DIM {
        return Err(ThermoconeError::DimensionGuard {
            dim: d,
            max: MAX_PAST_DIM,
            what: "past-cone vertex enumeration",
        });
    }
    let gamma = ctx.gamma();
    let p_curve = thermo_curve(p, ctx)?;
    let elbows = p_curve.elbows();
    // chamber grid
    let mut grid = vec![0.0; d + 1];
    for (j, &level) in pi.perm().iter().enumerate() {
        grid[j + 1] = grid[j] + gamma[level];
    }
    grid[d] = 1.0;

    // rows a · q >= b
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(3 * d - 2);
    for i in 0..d {
        let mut a = vec![0.0; d];
        a[i] = 1.0;
        rows.push((a, 0.0));
    }
    for k in 0..d - 1 {
        let mut a = vec![0.0; d];
        a[pi.perm()[k]] = gamma[pi.perm()[k + 1]];
        a[pi.perm()[k + 1]] = -gamma[pi.perm()[k]];
        rows.push((a, 0.0));
    }
    for m in 1..d {
        let (xm, pm) = elbows[m];
        // segment of the chamber grid containing x_m; the bound is strict
        // so that zero-width segments stacked at x_m join the prefix (the
        // curve value at a grid point is the top of its vertical stack)
        let mut j = grid
            .iter()
            .position(|&v| v > xm)
            .unwrap_or(d);
        j = j.clamp(1, d);
        let mut a = vec![0.0; d];
        for &level in &pi.perm()[..j - 1] {
            a[level] += gamma[pi.perm()[j - 1]];
        }
        a[pi.perm()[j - 1]] += xm - grid[j - 1];
        rows.push((a, gamma[pi.perm()[j - 1]] * pm));
    }

    let mut verts: Vec<Vec<f64>> = Vec::new();
    for combo in combinations(rows.len(), d - 1) {
        let mut m: Vec<Vec<f64>> = combo.iter().map(|&r| rows[r].0.clone()).collect();
        let mut rhs: Vec<f64> = combo.iter().map(|&r| rows[r].1).collect();
        m.push(vec![1.0; d]);
        rhs.push(1.0);
        let Some(q) = solve_square(m, rhs) else {
            continue;
        };
        let feasible = rows
            .iter()
            .all(|(a, b)| a.iter().zip(q.iter()).map(|(x, y)| x * y).sum::<f64>() - b >= -TOL_HREP);
        if !feasible {
            continue;
        }
        if !verts
            .iter()
            .any(|u| u.iter().zip(q.iter()).all(|(a, b)| (a - b).abs() < TOL_PAST_DEDUP))
        {
            verts.push(q);
        }
    }
    verts
        .into_iter()
        .map(|mut q| {
            for v in q.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            ProbVector::new(q)
        })
        .collect()
}

/// The past cone of `p` as one convex polytope per chamber (exact vertex
/// enumeration, d ≤ 4), together with the hull-union region that separates
/// incomparable states from the past in any dimension.
pub fn past_and_incomparable(
    p: &ProbVector,
    ctx: &GibbsContext,
) -> Result<(Vec<ConePolytope>, IncomparableRegion)> {
    let d = p.dim();
    let mut chambers = Vec::new();
    for perm in permutations(d) {
        let pi = BetaOrder::from_perm(perm)?;
        let vertices = past_chamber_vertices(p, ctx, &pi)?;
        chambers.push(ConePolytope {
            kind: ConeClass::Past,
            chamber: Some(pi),
            vertices,
        });
    }
    let region = incomparable_region(p, ctx)?;
    Ok((chambers, region))
}

/// The β-swap between the ground level (largest Gibbs weight) and physical
/// level `k`: the hottest elementary exchange that fully transfers the
/// thermal population ratio.  Its image is always in the future cone.
pub fn beta_swap(p: &ProbVector, ctx: &GibbsContext, k: usize) -> Result<ProbVector> {
    ctx.check_dim(p.dim())?;
    let gamma = ctx.gamma();
    let mut ground = 0;
    for (i, &g) in gamma.iter().enumerate() {
        if g > gamma[ground] {
            ground = i;
        }
    }
    if k >= p.dim() || k == ground {
        return Err(ThermoconeError::InvalidParameter {
            name: "k",
            message: format!("swap level {k} must differ from the ground level {ground}"),
        });
    }
    let g1 = gamma[ground];
    let gk = gamma[k];
    let mut q = p.entries().to_vec();
    let p1 = q[ground];
    let pk = q[k];
    q[ground] = ((g1 - gk) / g1) * p1 + pk;
    q[k] = (gk / g1) * p1;
    ProbVector::new(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{classify, Beta};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pv(entries: &[f64]) -> ProbVector {
        ProbVector::new(entries.to_vec()).unwrap()
    }

    fn ctx_beta_half() -> GibbsContext {
        GibbsContext::new(vec![0.0, 1.0, 2.0], Beta::Finite(0.5)).unwrap()
    }

    fn dirichlet(rng: &mut ChaCha8Rng, d: usize) -> ProbVector {
        let mut v: Vec<f64> = (0..d)
            .map(|_| -(rng.gen::<f64>().max(1e-16)).ln())
            .collect();
        let s: f64 = v.iter().sum();
        for x in v.iter_mut() {
            *x /= s;
        }
        ProbVector::new(v).unwrap()
    }

    #[test]
    fn future_cone_matches_reference_vertices() {
        let ctx = ctx_beta_half();
        let p = pv(&[0.4, 0.36, 0.24]);
        let cone = future_cone(&p, &ctx).unwrap();
        let expect: [[f64; 3]; 5] = [
            [0.61023596, 0.242612264, 0.147151776],
            [0.517387736, 0.242612264, 0.24],
            [0.471199261, 0.381648963, 0.147151776],
            [0.4, 0.381648963, 0.218351037],
            [0.4, 0.36, 0.24],
        ];
        assert_eq!(cone.vertices().len(), 5);
        for want in expect {
            assert!(
                cone.vertices().iter().any(|v| v
                    .entries()
                    .iter()
                    .zip(want.iter())
                    .all(|(a, b)| (a - b).abs() < 1e-8)),
                "missing vertex {want:?}"
            );
        }
        // every vertex must be in the future of p
        for v in cone.vertices() {
            let c = classify(v, &p, &ctx).unwrap();
            assert!(matches!(c, ConeClass::Future | ConeClass::Equivalent));
        }
    }

    #[test]
    fn sharp_state_future_is_whole_simplex() {
        let ctx = GibbsContext::uniform(3);
        let cone = future_cone(&pv(&[1.0, 0.0, 0.0]), &ctx).unwrap();
        assert_eq!(cone.vertices().len(), 3);
        for v in cone.vertices() {
            assert_abs_diff_eq!(v.entries().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            assert!(v.entries().iter().any(|&x| (x - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn gibbs_state_future_is_a_point() {
        let ctx = ctx_beta_half();
        let g = ctx.gibbs().clone();
        let cone = future_cone(&g, &ctx).unwrap();
        assert_eq!(cone.vertices().len(), 1);
        for (a, b) in cone.vertices()[0].entries().iter().zip(ctx.gamma()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn second_tangent_is_the_state_itself_d3() {
        let ctx = ctx_beta_half();
        for p in [pv(&[0.4, 0.36, 0.24]), pv(&[0.7, 0.2, 0.1])] {
            let order = beta_order(&p, &ctx).unwrap();
            let tangents = tangent_vectors_thermal(&p, &ctx).unwrap();
            let t2 = tangents
                .iter()
                .find(|t| t.level() == 2 && t.chamber() == &order)
                .unwrap();
            for (a, b) in t2.entries().iter().zip(p.entries()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn tangent_curves_touch_and_dominate() {
        let ctx = ctx_beta_half();
        let p = pv(&[0.4, 0.36, 0.24]);
        let order = beta_order(&p, &ctx).unwrap();
        let p_beta: Vec<f64> = order.perm().iter().map(|&i| p.entries()[i]).collect();
        let g_beta: Vec<f64> = order.perm().iter().map(|&i| ctx.gamma()[i]).collect();
        let pc = thermo_curve(&p, &ctx).unwrap();
        for n in 1..=3usize {
            let tc = tangent_curve(n, &order, &p_beta, &g_beta, &ctx);
            for (j, &(x, y)) in pc.elbows().iter().enumerate() {
                let diff = tc.eval(x) - y;
                assert!(diff >= -1e-12, "n={n} elbow {j}: diff={diff}");
                if j == n - 1 || j == n {
                    assert_abs_diff_eq!(diff, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn uniform_tangents_match_formula() {
        let p = pv(&[0.6, 0.3, 0.1]);
        let ts = tangent_vectors_uniform(&p).unwrap();
        assert_eq!(ts.len(), 3);
        // n=1: (p1, p1, 1 - 2 p1)
        assert_abs_diff_eq!(ts[0].entries()[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(ts[0].entries()[1], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(ts[0].entries()[2], -0.2, epsilon = 1e-15);
        // n=2: the sorted state itself
        for (a, b) in ts[1].entries().iter().zip([0.6, 0.3, 0.1].iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn projection_examples() {
        let id4 = BetaOrder::from_perm(vec![0, 1, 2, 3]).unwrap();
        let t = TangentVector::new(vec![0.9, 0.3, -0.1, -0.1], 1, id4).unwrap();
        let q = project_to_simplex(&t).unwrap();
        for (a, b) in q.entries().iter().zip([0.9, 0.1, 0.0, 0.0].iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }

        let id3 = BetaOrder::from_perm(vec![0, 1, 2]).unwrap();
        let t = TangentVector::new(vec![2.665, 1.616, -3.281], 1, id3.clone()).unwrap();
        let q = project_to_simplex(&t).unwrap();
        for (a, b) in q.entries().iter().zip([1.0, 0.0, 0.0].iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }

        // already on the simplex: unchanged
        let t = TangentVector::new(vec![0.5, 0.3, 0.2], 2, id3).unwrap();
        let q = project_to_simplex(&t).unwrap();
        assert_eq!(q.entries(), &[0.5, 0.3, 0.2]);
    }

    #[test]
    fn past_chambers_match_reference_inventory() {
        let ctx = GibbsContext::new(vec![0.0, 2.0, 3.0], Beta::Finite(0.5)).unwrap();
        let p = pv(&[0.7, 0.2, 0.1]);
        assert_abs_diff_eq!(ctx.gamma()[0], 0.628531719, epsilon = 1e-8);
        let (chambers, _region) = past_and_incomparable(&p, &ctx).unwrap();
        let mut counts: Vec<(Vec<usize>, usize)> = chambers
            .iter()
            .map(|c| (c.chamber().unwrap().perm().to_vec(), c.vertices().len()))
            .collect();
        counts.sort();
        let expect: [(&[usize], usize); 6] = [
            (&[0, 1, 2], 5),
            (&[0, 2, 1], 5),
            (&[1, 0, 2], 5),
            (&[1, 2, 0], 4),
            (&[2, 0, 1], 5),
            (&[2, 1, 0], 4),
        ];
        for ((perm, count), (eperm, ecount)) in counts.iter().zip(expect.iter()) {
            assert_eq!(perm.as_slice(), *eperm);
            assert_eq!(count, ecount, "chamber {perm:?}");
        }
        let total: usize = counts.iter().map(|(_, c)| c).sum();
        assert_eq!(total, 28);

        // spot-check two reference vertices
        let c0 = chambers
            .iter()
            .find(|c| c.chamber().unwrap().perm() == [0, 1, 2])
            .unwrap();
        assert!(c0.vertices().iter().any(|v| {
            let e = v.entries();
            (e[0] - 0.731058579).abs() < 1e-8 && (e[1] - 0.268941421).abs() < 1e-8
        }));
        let c5 = chambers
            .iter()
            .find(|c| c.chamber().unwrap().perm() == [2, 1, 0])
            .unwrap();
        assert!(c5.vertices().iter().any(|v| {
            let e = v.entries();
            e[0].abs() < 1e-8 && (e[1] - 0.622459331).abs() < 1e-8
        }));

        // every enumerated vertex must be able to reach p
        for chamber in &chambers {
            for v in chamber.vertices() {
                let c = classify(v, &p, &ctx).unwrap();
                assert!(
                    matches!(c, ConeClass::Past | ConeClass::Equivalent),
                    "vertex {:?} classified {c:?}",
                    v.entries()
                );
            }
        }
    }

    #[test]
    fn region_classification_agrees_with_curves() {
        let ctx = ctx_beta_half();
        let p = pv(&[0.4, 0.36, 0.24]);
        let region = incomparable_region(&p, &ctx).unwrap();
        assert_eq!(region.piece_count(), 12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen_inc = 0;
        for _ in 0..500 {
            let q = dirichlet(&mut rng, 3);
            let by_curve = classify(&q, &p, &ctx).unwrap();
            let by_cones = classify_via_cones(&q, &p, &ctx, &region).unwrap();
            assert_eq!(by_curve, by_cones, "q = {:?}", q.entries());
            if by_curve == ConeClass::Incomparable {
                seen_inc += 1;
            }
        }
        assert!(seen_inc > 0, "sampler never produced an incomparable state");
    }

    #[test]
    fn beta_swap_reference_and_membership() {
        let ctx = ctx_beta_half();
        let p = pv(&[0.4, 0.36, 0.24]);
        let q1 = beta_swap(&p, &ctx, 1).unwrap();
        for (a, b) in q1
            .entries()
            .iter()
            .zip([0.517387736, 0.242612264, 0.24].iter())
        {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
        let q2 = beta_swap(&p, &ctx, 2).unwrap();
        for (a, b) in q2
            .entries()
            .iter()
            .zip([0.492848224, 0.36, 0.147151776].iter())
        {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
        for q in [q1, q2] {
            assert_eq!(classify(&q, &p, &ctx).unwrap(), ConeClass::Future);
        }
        // swapping with the ground level itself is rejected
        assert!(beta_swap(&p, &ctx, 0).is_err());

        // at infinite temperature on two levels the swap is a transposition
        let ctx2 = GibbsContext::uniform(2);
        let p2 = pv(&[0.7, 0.3]);
        let q = beta_swap(&p2, &ctx2, 1).unwrap();
        for (a, b) in q.entries().iter().zip([0.3, 0.7].iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn combination_and_permutation_helpers() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(combinations(7, 2).len(), 21);
        assert_eq!(combinations(10, 3).len(), 120);
        assert_eq!(combinations(4, 4), vec![vec![0, 1, 2, 3]]);
    }
}
