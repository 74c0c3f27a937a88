use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::prob::Probability;

use super::enumerate::ExactOracle;
use super::mechanism::FiniteMechanism;
use super::universe::Universe;

/// Per-point results of the simulated membership game.
///
/// The attacker is the Bayes predictor: it claims membership iff the exact
/// posterior exceeds 1/2. `exact_*` fields are the accuracies that predictor
/// attains in expectation; `*_se` is the binomial standard error at the exact
/// accuracy for the realised number of predictions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSimulation {
    pub point: usize,
    pub prior: Probability,
    pub positive_predictions: u64,
    pub empirical_positive_accuracy: Option<f64>,
    pub exact_positive_accuracy: Option<f64>,
    pub positive_se: Option<f64>,
    pub negative_predictions: u64,
    pub empirical_negative_accuracy: Option<f64>,
    pub exact_negative_accuracy: Option<f64>,
    pub negative_se: Option<f64>,
    pub empirical_accuracy: f64,
    pub exact_accuracy: f64,
    pub accuracy_se: f64,
}

impl PointSimulation {
    /// Largest deviation between empirical and exact accuracy, in standard
    /// errors. A zero standard error with a mismatch gives `inf`.
    pub fn max_z(&self) -> f64 {
        let z = |emp: Option<f64>, exact: Option<f64>, se: Option<f64>| match (emp, exact, se) {
            (Some(e), Some(x), Some(s)) => {
                let d = (e - x).abs();
                if d <= 1e-12 {
                    0.0
                } else if s > 0.0 {
                    d / s
                } else {
                    f64::INFINITY
                }
            }
            _ => 0.0,
        };
        z(
            self.empirical_positive_accuracy,
            self.exact_positive_accuracy,
            self.positive_se,
        )
        .max(z(
            self.empirical_negative_accuracy,
            self.exact_negative_accuracy,
            self.negative_se,
        ))
        .max(z(
            Some(self.empirical_accuracy),
            Some(self.exact_accuracy),
            Some(self.accuracy_se),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub seed: u64,
    pub points: Vec<PointSimulation>,
}

#[derive(Clone)]
struct Counts {
    pos_pred: Vec<u64>,
    pos_hit: Vec<u64>,
    neg_pred: Vec<u64>,
    neg_hit: Vec<u64>,
}

impl Counts {
    fn zero(n: usize) -> Self {
        Counts {
            pos_pred: vec![0; n],
            pos_hit: vec![0; n],
            neg_pred: vec![0; n],
            neg_hit: vec![0; n],
        }
    }

    fn merge(mut self, o: Counts) -> Counts {
        for i in 0..self.pos_pred.len() {
            self.pos_pred[i] += o.pos_pred[i];
            self.pos_hit[i] += o.pos_hit[i];
            self.neg_pred[i] += o.neg_pred[i];
            self.neg_hit[i] += o.neg_hit[i];
        }
        self
    }
}

fn cdf_rows(m: &FiniteMechanism) -> Vec<Vec<f64>> {
    (0..m.mask_count())
        .map(|mask| {
            let mut acc = 0.0;
            m.row(mask)
                .iter()
                .map(|lp| {
                    acc += lp.exp();
                    acc
                })
                .collect()
        })
        .collect()
}

fn sample_outcome(cdf: &[f64], draw: f64) -> usize {
    let total = *cdf.last().expect("at least two outcomes");
    let idx = cdf.partition_point(|&c| c <= draw * total);
    if idx < cdf.len() {
        return idx;
    }
    // rounding left the draw past the last cumulative value
    cdf.iter()
        .enumerate()
        .rev()
        .find(|&(k, &c)| k == 0 || c > cdf[k - 1])
        .map_or(0, |(k, _)| k)
}

fn se(a: f64, n: u64) -> f64 {
    (a * (1.0 - a) / n as f64).sqrt()
}

/// Plays the membership game `trials` times.
///
/// Trial `t` draws a dataset from the priors and then an outcome from the
/// mechanism, using a ChaCha8 generator seeded with `seed` on stream `t`, so
/// results do not depend on the thread count.
pub fn simulate_mi_game(u: &Universe, m: &FiniteMechanism, trials: u64, seed: u64) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let oracle = ExactOracle::new(u, m)?;
    let n = u.len();
    let k = m.outcome_count();

    let mut outcome_prob = vec![0.0; k];
    let mut posterior = vec![f64::NAN; k * n];
    for o in 0..k {
        match oracle.posteriors(o) {
            Ok(post) => {
                outcome_prob[o] = oracle.outcome_log_prob(o)?.exp();
                posterior[o * n..(o + 1) * n].copy_from_slice(&post);
            }
            Err(Error::ZeroProbabilityOutcome { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    let cdfs = cdf_rows(m);
    let probs: Vec<f64> = u.probs().iter().map(|p| p.value()).collect();
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || Counts::zero(n),
            |mut c, t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t);
                let mut mask = 0usize;
                for (i, &p) in probs.iter().enumerate() {
                    if rng.random::<f64>() < p {
                        mask |= 1 << i;
                    }
                }
                let o = sample_outcome(&cdfs[mask], rng.random::<f64>());
                for i in 0..n {
                    let member = mask & (1 << i) != 0;
                    if posterior[o * n + i] > 0.5 {
                        c.pos_pred[i] += 1;
                        c.pos_hit[i] += member as u64;
                    } else {
                        c.neg_pred[i] += 1;
                        c.neg_hit[i] += !member as u64;
                    }
                }
                c
            },
        )
        .reduce(|| Counts::zero(n), Counts::merge);

    let points = (0..n)
        .map(|i| {
            let (mut pos_mass, mut pos_hit, mut neg_mass, mut neg_hit) = (0.0, 0.0, 0.0, 0.0);
            for o in 0..k {
                let w = outcome_prob[o];
                if w == 0.0 {
                    continue;
                }
                let q = posterior[o * n + i];
                if q > 0.5 {
                    pos_mass += w;
                    pos_hit += w * q;
                } else {
                    neg_mass += w;
                    neg_hit += w * (1.0 - q);
                }
            }
            let total = pos_mass + neg_mass;
            let exact_pos = (pos_mass > 0.0).then(|| pos_hit / pos_mass);
            let exact_neg = (neg_mass > 0.0).then(|| neg_hit / neg_mass);
            let exact_acc = (pos_hit + neg_hit) / total;
            let (pp, np) = (counts.pos_pred[i], counts.neg_pred[i]);
            let ratio = |hit: u64, pred: u64| (pred > 0).then(|| hit as f64 / pred as f64);
            PointSimulation {
                point: i,
                prior: u.prob(i),
                positive_predictions: pp,
                empirical_positive_accuracy: ratio(counts.pos_hit[i], pp),
                exact_positive_accuracy: exact_pos,
                positive_se: exact_pos.filter(|_| pp > 0).map(|a| se(a, pp)),
                negative_predictions: np,
                empirical_negative_accuracy: ratio(counts.neg_hit[i], np),
                exact_negative_accuracy: exact_neg,
                negative_se: exact_neg.filter(|_| np > 0).map(|a| se(a, np)),
                empirical_accuracy: (counts.pos_hit[i] + counts.neg_hit[i]) as f64 / trials as f64,
                exact_accuracy: exact_acc,
                accuracy_se: se(exact_acc, trials),
            }
        })
        .collect();

    Ok(SimulationReport { trials, seed, points })
}
