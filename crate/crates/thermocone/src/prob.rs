//! Probabilistic cones: the largest conversion probability between pure
//! bipartite states with given Schmidt coefficient vectors, and the cones of
//! states reachable (or able to reach) with at least a prescribed
//! probability.
//!
//! Orientation note: this module speaks the entanglement-transformation
//! language, where a state can be converted into anything that majorises
//! its Schmidt vector.  The future cone of `p` at probability 1 is
//! therefore `{q : q ≻ p}` — the uniform vector can reach everything and
//! nothing but sharp vectors can reach a sharp vector.  Thermodynamic
//! callers that want the opposite labelling swap Future and Past.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ThermoconeError};
use crate::simplex::ProbVector;

/// Slack for comparing a conversion probability against a threshold.
const TOL_PROB: f64 = 1e-12;

/// Denominator tails below this are treated as zero (the constraint is
/// vacuous there).
const TOL_TAIL: f64 = 1e-15;

/// The largest probability with which `p` can be converted into `q`:
/// the minimum over k of the ratio of sorted tail sums
/// tail_p(k) / tail_q(k), capped at 1.  Equals 1 exactly when p ≺ q.
pub fn vidal_probability(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(ThermoconeError::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let sp = p.sorted_desc();
    let sq = q.sorted_desc();
    let mut tail_p = 1.0f64;
    let mut tail_q = 1.0f64;
    let mut best = f64::INFINITY;
    for k in 0..p.dim() {
        if tail_q > TOL_TAIL {
            let ratio = (tail_p.max(0.0)) / tail_q;
            if ratio < best {
                best = ratio;
            }
        }
        tail_p -= sp[k];
        tail_q -= sq[k];
    }
    Ok(best.min(1.0))
}

/// The most-majorising state reachable from `p` with certainty that can be
/// converted back to `p` with probability exactly `prob`: the sorted state
/// scaled by `prob` with the deficit placed on the largest entry.
pub fn tilde_distribution(p: &ProbVector, prob: f64) -> Result<ProbVector> {
    check_prob(prob)?;
    let mut s = p.sorted_desc();
    for v in s.iter_mut() {
        *v *= prob;
    }
    s[0] += 1.0 - prob;
    ProbVector::new(s)
}

/// The threshold state of the probability-`prob` future cone of `p`:
/// `q` is reachable from `p` with probability at least `prob` exactly when
/// `q` majorises this state.
///
/// Construction: divide the sorted state by `prob`, subtract the excess
/// 1/prob − 1 from the largest entry, then average the first n* entries,
/// where n* is the largest n whose guaranteed conversion threshold
/// (n−1) p_n − Σ_{i<n} p_i + 1 still exceeds `prob`.
pub fn hat_distribution(p: &ProbVector, prob: f64) -> Result<ProbVector> {
    check_prob(prob)?;
    let s = p.sorted_desc();
    let d = s.len();
    let mut out: Vec<f64> = s.iter().map(|v| v / prob).collect();
    out[0] += 1.0 - 1.0 / prob;
    let mut n_star = 0usize;
    let mut head = 0.0;
    for n in 2..=d {
        head += s[n - 2];
        let crit = (n as f64 - 1.0) * s[n - 1] - head + 1.0;
        if prob < crit {
            n_star = n;
        }
    }
    if n_star >= 2 {
        let mean: f64 = out[..n_star].iter().sum::<f64>() / n_star as f64;
        for v in out[..n_star].iter_mut() {
            *v = mean;
        }
    }
    ProbVector::new(out)
}

/// A source state with a guaranteed conversion probability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbConeQuery {
    source: ProbVector,
    prob: f64,
}

impl ProbConeQuery {
    /// Validates the probability threshold (must lie in (0, 1]).
    pub fn new(source: ProbVector, prob: f64) -> Result<Self> {
        check_prob(prob)?;
        Ok(Self { source, prob })
    }

    /// The source state.
    pub fn source(&self) -> &ProbVector {
        &self.source
    }

    /// The probability threshold.
    pub fn prob(&self) -> f64 {
        self.prob
    }
}

fn check_prob(prob: f64) -> Result<()> {
    if !(prob > 0.0 && prob <= 1.0) {
        return Err(ThermoconeError::InvalidParameter {
            name: "prob",
            message: format!("conversion probability must lie in (0, 1], got {prob}"),
        });
    }
    Ok(())
}

/// Position of a state relative to the probabilistic cones of a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbClass {
    /// Reachable from the source with at least the queried probability.
    Future,
    /// Able to reach the source with at least the queried probability.
    Past,
    /// Both directions succeed at the queried probability.
    Interconvertible,
    /// Neither direction reaches the queried probability.
    Incomparable,
}

impl std::fmt::Display for ProbClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ProbClass::Future => "future",
            ProbClass::Past => "past",
            ProbClass::Interconvertible => "interconvertible",
            ProbClass::Incomparable => "incomparable",
        };
        write!(f, "{name}")
    }
}

/// Classifies `q` against the probabilistic cones of `query`.
pub fn prob_classify(q: &ProbVector, query: &ProbConeQuery) -> Result<ProbClass> {
    let forward = vidal_probability(query.source(), q)? >= query.prob() - TOL_PROB;
    let backward = vidal_probability(q, query.source())? >= query.prob() - TOL_PROB;
    Ok(match (forward, backward) {
        (true, true) => ProbClass::Interconvertible,
        (true, false) => ProbClass::Future,
        (false, true) => ProbClass::Past,
        (false, false) => ProbClass::Incomparable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::majorises;
    use approx::assert_abs_diff_eq;

    fn pv(entries: &[f64]) -> ProbVector {
        ProbVector::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn conversion_probability_anchors() {
        let p = pv(&[0.7, 0.2, 0.1]);
        let sharp = pv(&[1.0, 0.0, 0.0]);
        let eta = ProbVector::uniform(3);
        assert_abs_diff_eq!(vidal_probability(&p, &p).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vidal_probability(&p, &sharp).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vidal_probability(&sharp, &p).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vidal_probability(&p, &eta).unwrap(), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(vidal_probability(&eta, &p).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            vidal_probability(&p, &pv(&[0.5, 0.25, 0.25])).unwrap(),
            0.4,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            vidal_probability(&p, &pv(&[0.4, 0.35, 0.25])).unwrap(),
            0.4,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            vidal_probability(&p, &pv(&[0.8, 0.15, 0.05])).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            vidal_probability(&pv(&[0.8, 0.15, 0.05]), &p).unwrap(),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn threshold_distribution_tables() {
        let p = pv(&[0.7, 0.2, 0.1]);
        let cases: [(f64, [f64; 3], [f64; 3]); 6] = [
            (1.0, [0.7, 0.2, 0.1], [0.7, 0.2, 0.1]),
            (
                0.875,
                [0.7375, 0.175, 0.0875],
                [0.657142857, 0.228571429, 0.114285714],
            ),
            (0.75, [0.775, 0.15, 0.075], [0.6, 0.266666667, 0.133333333]),
            (0.625, [0.8125, 0.125, 0.0625], [0.52, 0.32, 0.16]),
            (0.5, [0.85, 0.1, 0.05], [0.4, 0.4, 0.2]),
            (0.4, [0.88, 0.08, 0.04], [0.375, 0.375, 0.25]),
        ];
        for (prob, tilde_want, hat_want) in cases {
            let t = tilde_distribution(&p, prob).unwrap();
            let h = hat_distribution(&p, prob).unwrap();
            for (got, want) in t.entries().iter().zip(tilde_want.iter()) {
                assert_abs_diff_eq!(got, want, epsilon = 1e-8);
            }
            for (got, want) in h.entries().iter().zip(hat_want.iter()) {
                assert_abs_diff_eq!(got, want, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn tilde_is_the_boundary_witness() {
        let p = pv(&[0.7, 0.2, 0.1]);
        for prob in [1.0, 0.875, 0.75, 0.625, 0.5, 0.4] {
            let t = tilde_distribution(&p, prob).unwrap();
            assert_abs_diff_eq!(vidal_probability(&p, &t).unwrap(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(vidal_probability(&t, &p).unwrap(), prob, epsilon = 1e-12);
        }
    }

    #[test]
    fn cones_nest_as_probability_drops() {
        let p = pv(&[0.7, 0.2, 0.1]);
        let probs = [1.0, 0.875, 0.75, 0.625, 0.5];
        for w in probs.windows(2) {
            let (hi, lo) = (w[0], w[1]);
            // future grows: its threshold state weakens
            let h_hi = hat_distribution(&p, hi).unwrap();
            let h_lo = hat_distribution(&p, lo).unwrap();
            assert!(majorises(&h_hi, &h_lo).unwrap());
            // past grows: its ceiling state strengthens
            let t_hi = tilde_distribution(&p, hi).unwrap();
            let t_lo = tilde_distribution(&p, lo).unwrap();
            assert!(majorises(&t_lo, &t_hi).unwrap());
        }
    }

    #[test]
    fn classification_examples() {
        let p = pv(&[0.7, 0.2, 0.1]);
        let query = ProbConeQuery::new(p.clone(), 0.75).unwrap();
        // certainty-interconvertible only with itself (and its permutations)
        assert_eq!(
            prob_classify(&p, &query).unwrap(),
            ProbClass::Interconvertible
        );
        let sharp = pv(&[1.0, 0.0, 0.0]);
        assert_eq!(prob_classify(&sharp, &query).unwrap(), ProbClass::Future);
        let eta = ProbVector::uniform(3);
        assert_eq!(prob_classify(&eta, &query).unwrap(), ProbClass::Past);

        // at probability 1 the interconvertible set is the equivalence class
        let q1 = ProbConeQuery::new(p.clone(), 1.0).unwrap();
        assert_eq!(
            prob_classify(&pv(&[0.2, 0.7, 0.1]), &q1).unwrap(),
            ProbClass::Interconvertible
        );
        assert_eq!(
            prob_classify(&pv(&[0.5, 0.45, 0.05]), &q1).unwrap(),
            ProbClass::Incomparable
        );
    }

    #[test]
    fn minimum_conversion_probability_is_dimension_times_tail() {
        let p = pv(&[0.7, 0.2, 0.1]);
        // the uniform state is the hardest target
        let floor = 3.0 * 0.1;
        let probes = [
            pv(&[0.34, 0.33, 0.33]),
            pv(&[0.5, 0.3, 0.2]),
            pv(&[0.4, 0.4, 0.2]),
            pv(&[0.36, 0.34, 0.30]),
        ];
        for q in probes {
            assert!(vidal_probability(&p, &q).unwrap() >= floor - 1e-12);
        }
        assert_abs_diff_eq!(
            vidal_probability(&p, &ProbVector::uniform(3)).unwrap(),
            floor,
            epsilon = 1e-12
        );
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(128))]

        #[test]
        fn threshold_states_characterize_the_cones(
            raw_p in proptest::collection::vec(0.02f64..1.0, 3),
            raw_q in proptest::collection::vec(0.02f64..1.0, 3),
            prob in 0.05f64..1.0,
        ) {
            let sp: f64 = raw_p.iter().sum();
            let sq: f64 = raw_q.iter().sum();
            let p = pv(&raw_p.iter().map(|x| x / sp).collect::<Vec<_>>());
            let q = pv(&raw_q.iter().map(|x| x / sq).collect::<Vec<_>>());
            let forward = vidal_probability(&p, &q).unwrap();
            let backward = vidal_probability(&q, &p).unwrap();
            // skip boundary-thin cases where tolerance conventions differ
            proptest::prop_assume!((forward - prob).abs() > 1e-9);
            proptest::prop_assume!((backward - prob).abs() > 1e-9);
            let hat = hat_distribution(&p, prob).unwrap();
            let tilde = tilde_distribution(&p, prob).unwrap();
            proptest::prop_assert_eq!(forward >= prob, majorises(&q, &hat).unwrap());
            proptest::prop_assert_eq!(backward >= prob, majorises(&tilde, &q).unwrap());
        }

        #[test]
        fn certainty_matches_majorisation(
            raw_p in proptest::collection::vec(0.02f64..1.0, 4),
            raw_q in proptest::collection::vec(0.02f64..1.0, 4),
        ) {
            let sp: f64 = raw_p.iter().sum();
            let sq: f64 = raw_q.iter().sum();
            let p = pv(&raw_p.iter().map(|x| x / sp).collect::<Vec<_>>());
            let q = pv(&raw_q.iter().map(|x| x / sq).collect::<Vec<_>>());
            let certain = vidal_probability(&p, &q).unwrap() >= 1.0 - 1e-12;
            proptest::prop_assert_eq!(certain, majorises(&q, &p).unwrap());
        }
    }
}
