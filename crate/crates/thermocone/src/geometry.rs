//! Small-dimension computational geometry: convex hulls with facet
//! inequalities, hull volumes, and point-membership tests.
//!
//! Cone polytopes live inside the probability simplex, so all geometric work
//! happens in the first d − 1 coordinates (dimensions 2 through 5 in
//! practice).  The hull builder is an incremental beneath-beyond algorithm
//! with simplicial facets; volumes are exact sums of signed simplex volumes.
//! Degenerate (lower-dimensional) vertex sets get volume zero and fall back
//! to a feasibility linear program for membership.

use crate::error::{Result, ThermoconeError};

/// Relative slack for facet visibility and membership tests.
const EPS_GEOM: f64 = 1e-10;

/// Phase-1 LP optimum below this value counts as feasible (point inside).
const EPS_LP: f64 = 1e-9;

/// n! as a float (n small).
pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Signed area of an ordered polygon (positive when counter-clockwise).
pub fn shoelace_area(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % n];
        acc += x0 * y1 - x1 * y0;
    }
    acc / 2.0
}

/// Determinant by LU decomposition with partial pivoting (small n).
fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    det
}

/// Normal of the hyperplane spanned by `edges` (n − 1 vectors in R^n),
/// computed component-wise as signed cofactors of the edge matrix.
fn hyperplane_normal(edges: &[Vec<f64>], n: usize) -> Vec<f64> {
    let mut normal = vec![0.0; n];
    for j in 0..n {
        let minor: Vec<Vec<f64>> = edges
            .iter()
            .map(|e| {
                e.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        normal[j] = sign * determinant(minor);
    }
    normal
}

#[derive(Debug, Clone)]
struct Facet {
    verts: Vec<usize>,
    normal: Vec<f64>,
    offset: f64,
}

/// A convex hull in R^n (n ≤ 5 in practice) with simplicial facets.
///
/// Lower-dimensional inputs produce a degenerate hull: zero volume, no
/// facets, membership answered by linear programming over the input points.
#[derive(Debug, Clone)]
pub struct ConvexHull {
    points: Vec<Vec<f64>>,
    dim: usize,
    facets: Vec<Facet>,
    volume: f64,
    degenerate: bool,
}

impl ConvexHull {
    /// Builds the hull of `points` in dimension `dim`.
    pub fn build(points: &[Vec<f64>], dim: usize) -> Result<Self> {
        if dim < 1 || dim > 8 {
            return Err(ThermoconeError::DimensionGuard {
                dim,
                max: 8,
                what: "convex hull",
            });
        }
        for p in points {
            if p.len() != dim {
                return Err(ThermoconeError::DimensionMismatch {
                    left: p.len(),
                    right: dim,
                });
            }
        }
        let scale = points
            .iter()
            .flat_map(|p| p.iter())
            .fold(1.0f64, |acc, &v| acc.max(v.abs()));
        let eps = EPS_GEOM * scale;

        let Some((simplex, centroid)) = initial_simplex(points, dim, eps) else {
            return Ok(Self {
                points: points.to_vec(),
                dim,
                facets: Vec::new(),
                volume: 0.0,
                degenerate: true,
            });
        };

        // facets of the initial simplex, oriented away from its centroid
        let mut facets: Vec<Facet> = Vec::new();
        for skip in 0..=dim {
            let verts: Vec<usize> = simplex
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != skip)
                .map(|(_, &v)| v)
                .collect();
            if let Some(f) = make_facet(points, &verts, &centroid, dim) {
                facets.push(f);
            }
        }

        let in_simplex: std::collections::HashSet<usize> = simplex.iter().cloned().collect();
        for idx in 0..points.len() {
            if in_simplex.contains(&idx) {
                continue;
            }
            let p = &points[idx];
            let visible: Vec<usize> = facets
                .iter()
                .enumerate()
                .filter(|(_, f)| dot(&f.normal, p) > f.offset + eps)
                .map(|(k, _)| k)
                .collect();
            if visible.is_empty() {
                continue;
            }
            // horizon ridges: sub-faces of visible facets shared with exactly
            // one visible facet; ordered map so the facet list (and every
            // float accumulation over it) is reproducible across processes
            let mut ridge_count: std::collections::BTreeMap<Vec<usize>, usize> =
                std::collections::BTreeMap::new();
            for &fk in &visible {
                let verts = &facets[fk].verts;
                for skip in 0..verts.len() {
                    let mut ridge: Vec<usize> = verts
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    ridge.sort_unstable();
                    *ridge_count.entry(ridge).or_insert(0) += 1;
                }
            }
            let visible_set: std::collections::HashSet<usize> = visible.iter().cloned().collect();
            let mut kept: Vec<Facet> = Vec::with_capacity(facets.len());
            for (k, f) in facets.into_iter().enumerate() {
                if !visible_set.contains(&k) {
                    kept.push(f);
                }
            }
            for (ridge, count) in ridge_count {
                if count != 1 {
                    continue;
                }
                let mut verts = ridge;
                verts.push(idx);
                if let Some(f) = make_facet(points, &verts, &centroid, dim) {
                    kept.push(f);
                }
            }
            facets = kept;
        }

        let mut volume = 0.0;
        for f in &facets {
            let m: Vec<Vec<f64>> = f
                .verts
                .iter()
                .map(|&v| {
                    points[v]
                        .iter()
                        .zip(centroid.iter())
                        .map(|(a, b)| a - b)
                        .collect()
                })
                .collect();
            volume += determinant(m).abs();
        }
        volume /= factorial(dim);

        Ok(Self {
            points: points.to_vec(),
            dim,
            facets,
            volume,
            degenerate: false,
        })
    }

    /// Hull volume (zero for degenerate inputs).
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True when the input was lower-dimensional.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Number of distinct hull vertices (input points on the boundary).
    pub fn vertex_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        for f in &self.facets {
            for &v in &f.verts {
                seen.insert(v);
            }
        }
        seen.len()
    }

    /// True when `x` lies inside or on the hull (within tolerance `tol`
    /// scaled by the facet offsets).  Degenerate hulls answer by LP.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if self.degenerate {
            return point_in_convex_hull(x, &self.points, EPS_LP);
        }
        self.facets
            .iter()
            .all(|f| dot(&f.normal, x) <= f.offset + tol * (1.0 + f.offset.abs()))
    }

    /// Facet inequalities as (normal, offset) pairs with inside meaning
    /// normal · x ≤ offset.
    pub fn facet_inequalities(&self) -> Vec<(Vec<f64>, f64)> {
        self.facets
            .iter()
            .map(|f| (f.normal.clone(), f.offset))
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Greedy affinely-independent point selection; returns the n + 1 simplex
/// indices and their centroid, or `None` when the cloud is degenerate.
fn initial_simplex(points: &[Vec<f64>], dim: usize, eps: f64) -> Option<(Vec<usize>, Vec<f64>)> {
    if points.len() < dim + 1 {
        return None;
    }
    let mut chosen = vec![0usize];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for _ in 0..dim {
        let mut best = None;
        let mut best_norm = eps;
        for (idx, p) in points.iter().enumerate() {
            if chosen.contains(&idx) {
                continue;
            }
            // residual of p - p0 after projection onto the current basis
            let mut r: Vec<f64> = p
                .iter()
                .zip(points[chosen[0]].iter())
                .map(|(a, b)| a - b)
                .collect();
            for b in &basis {
                let c = dot(&r, b);
                for (rk, bk) in r.iter_mut().zip(b.iter()) {
                    *rk -= c * bk;
                }
            }
            let norm = dot(&r, &r).sqrt();
            if norm > best_norm {
                best_norm = norm;
                best = Some((idx, r));
            }
        }
        let (idx, mut r) = best?;
        let norm = dot(&r, &r).sqrt();
        for v in r.iter_mut() {
            *v /= norm;
        }
        basis.push(r);
        chosen.push(idx);
    }
    let mut centroid = vec![0.0; dim];
    for &idx in &chosen {
        for (c, v) in centroid.iter_mut().zip(points[idx].iter()) {
            *c += v;
        }
    }
    for c in centroid.iter_mut() {
        *c /= (dim + 1) as f64;
    }
    Some((chosen, centroid))
}

/// Builds an outward-oriented facet through `verts`, or `None` when the
/// vertices are affinely dependent (zero normal).
fn make_facet(
    points: &[Vec<f64>],
    verts: &[usize],
    interior: &[f64],
    dim: usize,
) -> Option<Facet> {
    let base = &points[verts[0]];
    let edges: Vec<Vec<f64>> = verts[1..]
        .iter()
        .map(|&v| {
            points[v]
                .iter()
                .zip(base.iter())
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    let mut normal = hyperplane_normal(&edges, dim);
    let norm = dot(&normal, &normal).sqrt();
    if norm < 1e-300 {
        return None;
    }
    for v in normal.iter_mut() {
        *v /= norm;
    }
    let mut offset = dot(&normal, base);
    if dot(&normal, interior) > offset {
        for v in normal.iter_mut() {
            *v = -*v;
        }
        offset = -offset;
    }
    Some(Facet {
        verts: verts.to_vec(),
        normal,
        offset,
    })
}

/// True when `point` lies in the convex hull of `vertices`, decided by a
/// phase-1 simplex method on Σ λ_v vertices[v] = point, Σ λ_v = 1, λ ≥ 0.
/// Works in any dimension and for degenerate vertex sets.
pub fn point_in_convex_hull(point: &[f64], vertices: &[Vec<f64>], tol: f64) -> bool {
    let nv = vertices.len();
    if nv == 0 {
        return false;
    }
    let dim = point.len();
    let m = dim + 1;
    // rows: coordinates then the normalization row; make all rhs >= 0
    let mut a = vec![vec![0.0f64; nv]; m];
    let mut b = vec![0.0f64; m];
    for r in 0..dim {
        for (c, v) in vertices.iter().enumerate() {
            a[r][c] = v[r];
        }
        b[r] = point[r];
    }
    for c in 0..nv {
        a[dim][c] = 1.0;
    }
    b[dim] = 1.0;
    for r in 0..m {
        if b[r] < 0.0 {
            b[r] = -b[r];
            for c in 0..nv {
                a[r][c] = -a[r][c];
            }
        }
    }
    // tableau with one artificial variable per row; minimize their sum
    let cols = nv + m;
    let mut t = vec![vec![0.0f64; cols + 1]; m];
    let mut basis = vec![0usize; m];
    for r in 0..m {
        t[r][..nv].copy_from_slice(&a[r]);
        t[r][nv + r] = 1.0;
        t[r][cols] = b[r];
        basis[r] = nv + r;
    }
    // reduced cost row for the artificial objective
    let mut cost = vec![0.0f64; cols + 1];
    for r in 0..m {
        for c in 0..cols + 1 {
            cost[c] -= t[r][c];
        }
    }
    for c in nv..cols {
        cost[c] += 1.0;
    }

    let max_iter = 50 * (cols + m);
    for _ in 0..max_iter {
        // Bland's rule: first column with negative reduced cost
        let Some(enter) = (0..cols).find(|&c| cost[c] < -1e-11) else {
            break;
        };
        let mut leave = None;
        let mut best = f64::INFINITY;
        for r in 0..m {
            if t[r][enter] > 1e-11 {
                let ratio = t[r][cols] / t[r][enter];
                if ratio < best - 1e-15 {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(lr) = leave else {
            break; // unbounded (cannot happen for this bounded feasibility LP)
        };
        // pivot
        let pivot = t[lr][enter];
        for c in 0..cols + 1 {
            t[lr][c] /= pivot;
        }
        for r in 0..m {
            if r != lr && t[r][enter].abs() > 0.0 {
                let f = t[r][enter];
                for c in 0..cols + 1 {
                    t[r][c] -= f * t[lr][c];
                }
            }
        }
        let f = cost[enter];
        for c in 0..cols + 1 {
            cost[c] -= f * t[lr][c];
        }
        basis[lr] = enter;
    }
    let infeasibility: f64 = (0..m)
        .filter(|&r| basis[r] >= nv)
        .map(|r| t[r][cols])
        .sum();
    infeasibility <= tol
}
