//! Schmidt-coefficient sampling for Haar-random bipartite pure states.
//!
//! The reduced state of a Haar-random pure state on an N x M system
//! (N ≤ M) has the spectrum of a complex Wishart matrix G·G† with G an
//! N x M matrix of independent standard complex Gaussians, normalized to
//! unit trace.  That spectrum can be drawn with only O(N) random numbers:
//! a lower-bidiagonal matrix B with squared entries b_i² ~ Gamma(M−i+1)
//! and c_i² ~ Gamma(N−i) yields the symmetric tridiagonal T = B·Bᵀ whose
//! eigenvalues follow the same law (the overall scale cancels in the
//! normalization).  Eigenvalues come from an implicit-shift QL iteration
//! that never forms eigenvectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ThermoconeError};
use crate::simplex::ProbVector;

/// Samples per worker block; each block owns one RNG stream so results
/// are bit-identical for a fixed seed at any worker-thread count.
const SAMPLE_BLOCK: usize = 1_024;

/// A bipartite dimension pair with the seed of its sampling stream.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InducedMeasureSpec {
    n_sys: usize,
    m_env: usize,
    seed: u64,
}

impl InducedMeasureSpec {
    /// Validates 1 ≤ N ≤ M.
    pub fn new(n_sys: usize, m_env: usize, seed: u64) -> Result<Self> {
        if n_sys < 1 || m_env < n_sys {
            return Err(ThermoconeError::InvalidParameter {
                name: "n_sys/m_env",
                message: format!("need 1 <= N <= M, got N={n_sys}, M={m_env}"),
            });
        }
        Ok(Self { n_sys, m_env, seed })
    }

    /// Smaller subsystem dimension N (the Schmidt vector length).
    pub fn n_sys(&self) -> usize {
        self.n_sys
    }

    /// Larger subsystem dimension M.
    pub fn m_env(&self) -> usize {
        self.m_env
    }

    /// Master seed of the sampling stream.
    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// All eigenvalues of a symmetric tridiagonal matrix, sorted ascending.
/// `diag` holds the n diagonal entries, `off` the n−1 subdiagonal entries.
/// Implicit-shift QL iteration, values only.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(ThermoconeError::DimensionMismatch {
            left: off.len() + 1,
            right: n,
        });
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            // first negligible subdiagonal at or after l bounds the
            // unreduced block
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(ThermoconeError::Numerical {
                    context: "tridiagonal eigenvalues",
                    message: "QL iteration failed to converge".into(),
                });
            }
            // shift from the 2x2 block at l
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let signed = if g >= 0.0 { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + signed);
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // rotation annihilated early: split the block here
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    Ok(d)
}

/// One Schmidt draw: the trace-normalized, descending spectrum of the
/// tridiagonal Wishart model for an N x M bipartition.
pub fn schmidt_draw<R: Rng + ?Sized>(rng: &mut R, n_sys: usize, m_env: usize) -> Result<ProbVector> {
    let n = n_sys;
    let mut b2 = Vec::with_capacity(n);
    for i in 0..n {
        let shape = (m_env - i) as f64;
        let gamma = Gamma::new(shape, 1.0).map_err(|e| ThermoconeError::Numerical {
            context: "gamma sampling",
            message: e.to_string(),
        })?;
        b2.push(gamma.sample(rng));
    }
    let mut c2 = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        let shape = (n - 1 - i) as f64;
        let gamma = Gamma::new(shape, 1.0).map_err(|e| ThermoconeError::Numerical {
            context: "gamma sampling",
            message: e.to_string(),
        })?;
        c2.push(gamma.sample(rng));
    }
    let mut diag = b2.clone();
    for i in 1..n {
        diag[i] += c2[i - 1];
    }
    let off: Vec<f64> = (0..n.saturating_sub(1))
        .map(|i| (b2[i] * c2[i]).sqrt())
        .collect();
    let mut ev = tridiagonal_eigenvalues(&diag, &off)?;
    let trace: f64 = ev.iter().sum();
    if !(trace > 0.0) {
        return Err(ThermoconeError::Numerical {
            context: "schmidt draw",
            message: format!("non-positive spectrum trace {trace}"),
        });
    }
    for v in ev.iter_mut() {
        *v /= trace;
    }
    ev.reverse(); // ascending -> descending
    ProbVector::new(ev)
}

/// `n` Schmidt vectors for the given bipartition, each a sorted
/// probability vector.  Drawn in fixed-size blocks on per-block RNG
/// streams: the output is bit-identical for a fixed spec at any
/// worker-thread count.
pub fn sample_schmidt(spec: &InducedMeasureSpec, n: usize) -> Result<Vec<ProbVector>> {
    if n < 1 {
        return Err(ThermoconeError::InvalidParameter {
            name: "samples",
            message: "need at least one sample".into(),
        });
    }
    let blocks = n.div_ceil(SAMPLE_BLOCK);
    let chunks = (0..blocks)
        .into_par_iter()
        .map(|b| -> Result<Vec<ProbVector>> {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed());
            rng.set_stream(b as u64);
            let lo = b * SAMPLE_BLOCK;
            let hi = n.min(lo + SAMPLE_BLOCK);
            (lo..hi)
                .map(|_| schmidt_draw(&mut rng, spec.n_sys(), spec.m_env()))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}
