//! Oracles shared by the integration tests, implemented independently of
//! the library under test: brute-force majorisation, a dense bipartite
//! Schmidt-spectrum sampler with its own Hermitian eigensolver, and a
//! two-sample Kolmogorov–Smirnov test.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Does `p` majorise `q`?  Direct definition: compare all partial sums of
/// the non-increasingly sorted vectors.
pub fn majorises_brute(p: &[f64], q: &[f64], tol: f64) -> bool {
    assert_eq!(p.len(), q.len());
    let mut ps = p.to_vec();
    let mut qs = q.to_vec();
    ps.sort_by(|a, b| b.total_cmp(a));
    qs.sort_by(|a, b| b.total_cmp(a));
    let mut cp = 0.0;
    let mut cq = 0.0;
    for k in 0..p.len() {
        cp += ps[k];
        cq += qs[k];
        if cp < cq - tol {
            return false;
        }
    }
    true
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// returned in ascending order.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let scale: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a[i][j].abs())
        .fold(0.0, f64::max)
        .max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[p][k] = a[k][p];
                    a[k][q] = s * akp + c * akq;
                    a[q][k] = a[k][q];
                }
                let app = a[p][p];
                let aqq = a[q][q];
                let apq = a[p][q];
                a[p][p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a[q][q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

/// Eigenvalues (ascending) of a complex Hermitian matrix H = A + iB via
/// the doubled real-symmetric embedding [[A, −B], [B, A]], whose spectrum
/// is that of H with every eigenvalue repeated twice.
pub fn hermitian_eigenvalues(h: &[Vec<Complex64>]) -> Vec<f64> {
    let n = h.len();
    let mut s = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            s[i][j] = h[i][j].re;
            s[i + n][j + n] = h[i][j].re;
            s[i][j + n] = -h[i][j].im;
            s[i + n][j] = h[i][j].im;
        }
    }
    let doubled = jacobi_eigenvalues(s);
    (0..n).map(|k| doubled[2 * k]).collect()
}

/// One Schmidt spectrum from the dense construction: an N×M matrix G of
/// independent standard complex Gaussians, eigenvalues of G·G† sorted
/// non-increasingly and normalized to sum 1.
pub fn dense_schmidt<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<f64> {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let g: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * inv_sqrt2, im * inv_sqrt2)
                })
                .collect()
        })
        .collect();
    let mut w = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for a in 0..n {
        for b in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..m {
                acc += g[a][k] * g[b][k].conj();
            }
            w[a][b] = acc;
        }
    }
    let mut eigs = hermitian_eigenvalues(&w);
    eigs.reverse();
    let total: f64 = eigs.iter().sum();
    eigs.iter().map(|e| (e / total).max(0.0)).collect()
}

/// Two-sample Kolmogorov–Smirnov test.  Returns (statistic, p-value); the
/// p-value is exact (lattice-path count) when n + m ≤ 500 and asymptotic
/// otherwise.
pub fn ks_two_sample(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (n, m) = (x.len(), y.len());
    assert!(n > 0 && m > 0);
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    // track n·m·|F_x − F_y| as the integer |i·m − j·n|, evaluated after
    // consuming all copies of each pooled value
    let (mut i, mut j) = (0usize, 0usize);
    let mut d_num: i128 = 0;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d_num = d_num.max((i as i128 * m as i128 - j as i128 * n as i128).abs());
    }
    let stat = d_num as f64 / (n as f64 * m as f64);
    let p = if n + m <= 500 {
        ks_exact_p(n, m, d_num)
    } else {
        ks_asymptotic_p(n, m, stat)
    };
    (stat, p)
}

/// Exact two-sample KS p-value P(D ≥ observed): one minus the fraction of
/// monotone lattice paths (0,0) → (n,m) keeping |i·m − j·n| strictly below
/// the observed numerator.
fn ks_exact_p(n: usize, m: usize, d_num: i128) -> f64 {
    let bound = d_num; // paths must satisfy |i·m − j·n| <= bound − 1
    let inside = |i: usize, j: usize| -> bool {
        (i as i128 * m as i128 - j as i128 * n as i128).abs() < bound
    };
    let mut prev = vec![0.0f64; m + 1];
    prev[0] = 1.0;
    for j in 1..=m {
        prev[j] = if inside(0, j) { prev[j - 1] } else { 0.0 };
    }
    let mut cur = vec![0.0f64; m + 1];
    for i in 1..=n {
        cur[0] = if inside(i, 0) { prev[0] } else { 0.0 };
        for j in 1..=m {
            cur[j] = if inside(i, j) {
                prev[j] + cur[j - 1]
            } else {
                0.0
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let mut total = 1.0f64;
    for k in 1..=n {
        total *= (m + k) as f64 / k as f64;
    }
    (1.0 - prev[m] / total).clamp(0.0, 1.0)
}

/// Asymptotic Kolmogorov survival function at λ = √(nm/(n+m))·stat.
fn ks_asymptotic_p(n: usize, m: usize, stat: f64) -> f64 {
    let en = ((n as f64 * m as f64) / (n as f64 + m as f64)).sqrt();
    let lambda = en * stat;
    let mut p = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64 * lambda).powi(2)).exp();
        p += 2.0 * sign * term;
        sign = -sign;
        if term < 1e-18 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}
