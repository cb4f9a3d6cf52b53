//! Measure-weighted cone volumes for pure-state entanglement
//! transformations.
//!
//! States are Schmidt-coefficient vectors and a source converts into any
//! target that majorises it, so the future cone of `p` is `{q : q ≻ p}`:
//! the uniform vector (maximally entangled) reaches everything, while a
//! sharp vector (product state) is reached by everything.  This is the
//! reverse of the flat-bath thermodynamic labelling.  Volumes are weighted
//! by the measure that Haar-random bipartite pure states induce on
//! Schmidt coefficients, estimated by classifying samples drawn from it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ThermoconeError};
use crate::geometry::factorial;
use crate::sampling::{sample_schmidt, InducedMeasureSpec};
use crate::simplex::ProbVector;
use crate::tol::TOL_CURVE;
use crate::volumes::{VolumeMethod, VolumeReport};

/// Cumulative sums of the entries sorted in non-increasing order.
fn sorted_cumsum(p: &ProbVector) -> Vec<f64> {
    let s = p.sorted_desc();
    let mut acc = 0.0;
    s.iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

/// Does the state with cumulative sums `a` majorise the one with `b`?
fn cum_majorises(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x - y >= -TOL_CURVE)
}

/// Classifies `n` induced-measure samples against `p` under the
/// entanglement order and reports the class frequencies.  Samples
/// equivalent to `p` count as future (they are reachable).  Bit-identical
/// for a fixed spec at any worker-thread count.
pub fn entanglement_cone_volumes(
    p: &ProbVector,
    spec: &InducedMeasureSpec,
    n: usize,
) -> Result<VolumeReport> {
    if p.dim() != spec.n_sys() {
        return Err(ThermoconeError::DimensionMismatch {
            left: p.dim(),
            right: spec.n_sys(),
        });
    }
    let samples = sample_schmidt(spec, n)?;
    let cums: Vec<Vec<f64>> = samples.par_iter().map(sorted_cumsum).collect();
    Ok(weighted_report(&sorted_cumsum(p), &cums))
}

/// Frequencies of {future, past, incomparable} for the centre state with
/// cumulative sums `centre` over the pre-summed `samples`.
fn weighted_report(centre: &[f64], samples: &[Vec<f64>]) -> VolumeReport {
    let counts = samples
        .par_iter()
        .fold(
            || [0u64; 3],
            |mut c, q| {
                let reaches = cum_majorises(q, centre);
                let reached = cum_majorises(centre, q);
                if reaches {
                    c[0] += 1; // future (equivalent folds here: still reachable)
                } else if reached {
                    c[1] += 1;
                } else {
                    c[2] += 1;
                }
                c
            },
        )
        .reduce(|| [0u64; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
    let n = samples.len() as f64;
    let v = [
        counts[0] as f64 / n,
        counts[1] as f64 / n,
        counts[2] as f64 / n,
    ];
    let se = v
        .iter()
        .map(|x| (x * (1.0 - x) / n).sqrt())
        .fold(0.0f64, f64::max);
    VolumeReport {
        v_future: v[0],
        v_past: v[1],
        v_incomparable: v[2],
        method: VolumeMethod::MonteCarlo,
        samples: Some(samples.len() as u64),
        std_error: Some(se),
    }
}

/// One sorted-chamber grid state with its measure-weighted volumes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntGridRow {
    /// Barycentric grid state, entries non-increasing.
    pub state: Vec<f64>,
    /// Number of distinct permutations this sorted state represents.
    pub weight: u64,
    /// Measure-weighted volumes of its three regions.
    pub report: VolumeReport,
}

/// Measure-weighted volumes on the regular barycentric grid of the sorted
/// chamber (entries non-increasing, denominators `resolution`).  The
/// entanglement order is permutation-invariant, so one chamber carries all
/// the information; each row records how many permutations it stands for.
/// A single batch of samples is shared by every grid state.
pub fn iso_entanglement_grid(
    spec: &InducedMeasureSpec,
    resolution: usize,
    n: usize,
) -> Result<Vec<EntGridRow>> {
    if resolution < 1 {
        return Err(ThermoconeError::InvalidParameter {
            name: "resolution",
            message: "grid resolution must be at least 1".into(),
        });
    }
    let samples = sample_schmidt(spec, n)?;
    let cums: Vec<Vec<f64>> = samples.par_iter().map(sorted_cumsum).collect();
    let states = sorted_grid_states(resolution, spec.n_sys());
    let rows: Result<Vec<EntGridRow>> = states
        .par_iter()
        .map(|parts| {
            let state: Vec<f64> = parts
                .iter()
                .map(|&k| k as f64 / resolution as f64)
                .collect();
            let p = ProbVector::new(state.clone())?;
            let report = weighted_report(&sorted_cumsum(&p), &cums);
            Ok(EntGridRow {
                state,
                weight: permutation_weight(parts),
                report,
            })
        })
        .collect();
    rows
}

/// All non-increasing compositions of `resolution` into `parts` parts.
fn sorted_grid_states(resolution: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(parts);
    fn recurse(
        remaining: usize,
        slots: usize,
        cap: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if slots == 0 {
            if remaining == 0 {
                out.push(current.clone());
            }
            return;
        }
        // each entry is bounded above by the previous one and must leave
        // enough for the rest to stay feasible
        let hi = cap.min(remaining);
        let lo = remaining.div_ceil(slots);
        for v in (lo..=hi).rev() {
            current.push(v);
            recurse(remaining - v, slots - 1, v, current, out);
            current.pop();
        }
    }
    recurse(resolution, parts, resolution, &mut current, &mut out);
    out
}

/// Number of distinct permutations of a sorted integer composition.
fn permutation_weight(parts: &[usize]) -> u64 {
    let mut weight = factorial(parts.len());
    let mut run = 1usize;
    for i in 1..=parts.len() {
        if i < parts.len() && parts[i] == parts[i - 1] {
            run += 1;
        } else {
            weight /= factorial(run);
            run = 1;
        }
    }
    weight.round() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pv(entries: &[f64]) -> ProbVector {
        ProbVector::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn uniform_centre_reaches_everything() {
        let spec = InducedMeasureSpec::new(3, 3, 1).unwrap();
        let eta = ProbVector::uniform(3);
        let r = entanglement_cone_volumes(&eta, &spec, 2_000).unwrap();
        assert_abs_diff_eq!(r.v_future, 1.0, epsilon = 1e-12);
        assert_eq!(r.v_past + r.v_incomparable, 0.0);
    }

    #[test]
    fn sharp_centre_is_reached_by_everything() {
        let spec = InducedMeasureSpec::new(3, 3, 2).unwrap();
        let sharp = pv(&[1.0, 0.0, 0.0]);
        let r = entanglement_cone_volumes(&sharp, &spec, 2_000).unwrap();
        assert_abs_diff_eq!(r.v_past, 1.0, epsilon = 1e-12);
        assert_eq!(r.v_future + r.v_incomparable, 0.0);
    }

    #[test]
    fn volumes_partition_and_are_deterministic() {
        let spec = InducedMeasureSpec::new(3, 6, 5).unwrap();
        let p = pv(&[0.7, 0.2, 0.1]);
        let a = entanglement_cone_volumes(&p, &spec, 5_000).unwrap();
        let b = entanglement_cone_volumes(&p, &spec, 5_000).unwrap();
        assert_eq!(a.v_future, b.v_future);
        assert_eq!(a.v_past, b.v_past);
        assert_abs_diff_eq!(a.v_future + a.v_past + a.v_incomparable, 1.0, epsilon = 1e-12);
        assert!(a.v_future > 0.0 && a.v_past > 0.0 && a.v_incomparable > 0.0);
        assert_eq!(a.samples, Some(5_000));
    }

    #[test]
    fn larger_environment_feeds_the_past_of_a_spread_state() {
        // more environment concentrates samples near the centre, which a
        // state near a vertex can reach less and be reached by more
        let p = pv(&[0.8, 0.15, 0.05]);
        let lo = entanglement_cone_volumes(&p, &InducedMeasureSpec::new(3, 6, 9).unwrap(), 20_000)
            .unwrap();
        let hi =
            entanglement_cone_volumes(&p, &InducedMeasureSpec::new(3, 30, 9).unwrap(), 20_000)
                .unwrap();
        assert!(
            hi.v_past > lo.v_past + 0.05,
            "past {} -> {}",
            lo.v_past,
            hi.v_past
        );
    }

    #[test]
    fn grid_covers_the_sorted_chamber_with_correct_weights() {
        let states = sorted_grid_states(6, 3);
        // weights must reproduce the full barycentric grid count
        let total: u64 = states.iter().map(|s| permutation_weight(s)).sum();
        assert_eq!(total, 7 * 8 / 2);
        for s in &states {
            assert!(s.windows(2).all(|w| w[0] >= w[1]));
            assert_eq!(s.iter().sum::<usize>(), 6);
        }
        assert_eq!(permutation_weight(&[2, 2, 2]), 1);
        assert_eq!(permutation_weight(&[3, 2, 1]), 6);
        assert_eq!(permutation_weight(&[4, 1, 1]), 3);
    }

    #[test]
    fn grid_rows_partition_and_anchor() {
        let spec = InducedMeasureSpec::new(3, 6, 4).unwrap();
        let rows = iso_entanglement_grid(&spec, 6, 3_000).unwrap();
        let eta = rows
            .iter()
            .find(|r| r.state.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-12))
            .expect("centre state on even grid");
        assert_abs_diff_eq!(eta.report.v_future, 1.0, epsilon = 1e-12);
        let sharp = rows
            .iter()
            .find(|r| (r.state[0] - 1.0).abs() < 1e-12)
            .unwrap();
        assert_abs_diff_eq!(sharp.report.v_past, 1.0, epsilon = 1e-12);
        for r in &rows {
            assert_abs_diff_eq!(
                r.report.v_future + r.report.v_past + r.report.v_incomparable,
                1.0,
                epsilon = 1e-12
            );
        }
    }
}
