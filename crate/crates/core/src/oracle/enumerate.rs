use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{negative_accuracy_bounds, positive_accuracy_bounds, BoundInterval};
use crate::error::{Error, Result};
use crate::logspace::{log_sum_exp, sigmoid};
use crate::prob::{Epsilon, Probability};

use super::mechanism::{mechanism_epsilon, FiniteMechanism};
use super::universe::Universe;

/// Slack allowed when comparing an exact posterior against its bound.
pub const BOUND_TOL: f64 = 1e-9;

/// Residual allowed in the dataset-pairing identity.
pub const PAIRING_TOL: f64 = 1e-12;

/// Exhaustive enumeration over all `2^N` datasets for one universe and mechanism.
#[derive(Debug)]
pub struct ExactOracle<'a> {
    u: &'a Universe,
    m: &'a FiniteMechanism,
    log_priors: Vec<f64>,
}

impl<'a> ExactOracle<'a> {
    pub fn new(u: &'a Universe, m: &'a FiniteMechanism) -> Result<Self> {
        m.check_universe(u)?;
        Ok(ExactOracle {
            u,
            m,
            log_priors: u.log_priors(),
        })
    }

    pub fn universe(&self) -> &Universe {
        self.u
    }

    pub fn mechanism(&self) -> &FiniteMechanism {
        self.m
    }

    fn joint(&self, outcome: usize) -> Vec<f64> {
        self.log_priors
            .iter()
            .enumerate()
            .map(|(mask, lp)| lp + self.m.log_prob(mask, outcome))
            .collect()
    }

    /// `ln P(S = outcome)` marginalised over datasets.
    pub fn outcome_log_prob(&self, outcome: usize) -> Result<f64> {
        self.m.check_outcome(outcome)?;
        Ok(log_sum_exp(&self.joint(outcome)))
    }

    /// `P(x_i ∈ D | S = outcome)` for every point `i`.
    pub fn posteriors(&self, outcome: usize) -> Result<Vec<f64>> {
        self.m.check_outcome(outcome)?;
        let joint = self.joint(outcome);
        let n = self.u.len();
        let mut max_in = vec![f64::NEG_INFINITY; n];
        let mut max_out = vec![f64::NEG_INFINITY; n];
        for (mask, &w) in joint.iter().enumerate() {
            for i in 0..n {
                let slot = if mask & (1 << i) != 0 {
                    &mut max_in[i]
                } else {
                    &mut max_out[i]
                };
                *slot = slot.max(w);
            }
        }
        if (0..n).all(|i| max_in[i] == f64::NEG_INFINITY && max_out[i] == f64::NEG_INFINITY) {
            return Err(Error::ZeroProbabilityOutcome { outcome });
        }
        let mut sum_in = vec![0.0; n];
        let mut sum_out = vec![0.0; n];
        for (mask, &w) in joint.iter().enumerate() {
            if w == f64::NEG_INFINITY {
                continue;
            }
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    sum_in[i] += (w - max_in[i]).exp();
                } else {
                    sum_out[i] += (w - max_out[i]).exp();
                }
            }
        }
        Ok((0..n)
            .map(|i| {
                let a = if sum_in[i] > 0.0 {
                    max_in[i] + sum_in[i].ln()
                } else {
                    f64::NEG_INFINITY
                };
                let b = if sum_out[i] > 0.0 {
                    max_out[i] + sum_out[i].ln()
                } else {
                    f64::NEG_INFINITY
                };
                match (a == f64::NEG_INFINITY, b == f64::NEG_INFINITY) {
                    (true, _) => 0.0,
                    (_, true) => 1.0,
                    _ => sigmoid(a - b),
                }
            })
            .collect())
    }

    pub fn posterior(&self, point: usize, outcome: usize) -> Result<Probability> {
        self.u.check_point(point)?;
        Ok(Probability::saturating(self.posteriors(outcome)?[point]))
    }
}

/// `P(x_point ∈ D | S = outcome)` by enumerating every dataset.
///
/// Fails with [`Error::ZeroProbabilityOutcome`] when the outcome cannot occur.
pub fn exact_posterior(u: &Universe, m: &FiniteMechanism, point: usize, outcome: usize) -> Result<Probability> {
    ExactOracle::new(u, m)?.posterior(point, outcome)
}

/// Outcome of the dataset-pairing check for one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub point: usize,
    pub pairs: usize,
    /// Largest `|ln P(D) + ln(P_x(0)/P_x(1)) - ln P(D')|` over all pairs.
    pub max_residual: f64,
    /// Whether `D ↦ D \ {x}` hit every dataset without `x` exactly once.
    pub bijective: bool,
    pub holds: bool,
}

/// Checks that removing `x_point` maps datasets containing it one-to-one onto
/// datasets without it, with `P(D') = P(D) · P_x(0) / P_x(1)`.
pub fn lemma1_check(u: &Universe, point: usize) -> Result<Lemma1Report> {
    u.check_point(point)?;
    let bit = 1u32 << point;
    let shift = u.log_odds_out(point);
    let mut hits = vec![0u8; u.mask_count()];
    let mut pairs = 0;
    let mut max_residual: f64 = 0.0;
    for mask in 0..u.mask_count() as u32 {
        if mask & bit == 0 {
            continue;
        }
        let partner = mask & !bit;
        hits[partner as usize] = hits[partner as usize].saturating_add(1);
        pairs += 1;
        let residual = (u.log_prior_bits(mask) + shift - u.log_prior_bits(partner)).abs();
        max_residual = max_residual.max(residual);
    }
    let bijective = (0..u.mask_count()).all(|m| (m as u32 & bit != 0) || hits[m] == 1);
    Ok(Lemma1Report {
        point,
        pairs,
        max_residual,
        bijective,
        holds: bijective && max_residual <= PAIRING_TOL,
    })
}

/// One exact posterior set against its bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PosteriorReport {
    pub point_index: usize,
    pub outcome_id: usize,
    pub prior: Probability,
    pub posterior: Probability,
    pub bound_interval: BoundInterval,
    pub inside: bool,
    pub negative_interval: BoundInterval,
    pub negative_inside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundVerification {
    /// Exact ε of the mechanism; `inf` means no finite ε applies and every
    /// interval is `[0, 1]`.
    pub eps: f64,
    pub skipped_outcomes: Vec<usize>,
    pub reports: Vec<PosteriorReport>,
}

impl BoundVerification {
    pub fn violations(&self) -> impl Iterator<Item = &PosteriorReport> {
        self.reports.iter().filter(|r| !r.inside || !r.negative_inside)
    }

    pub fn all_inside(&self) -> bool {
        self.violations().next().is_none()
    }

    /// Largest distance by which any posterior leaves its interval (0 if none).
    pub fn max_excess(&self) -> f64 {
        self.reports
            .iter()
            .map(|r| {
                let v = r.posterior.value();
                (r.bound_interval.lower.value() - v)
                    .max(v - r.bound_interval.upper.value())
                    .max(0.0)
            })
            .fold(0.0, f64::max)
    }
}

fn intervals(eps: f64, p: Probability) -> (BoundInterval, BoundInterval) {
    match Epsilon::new(eps) {
        Ok(e) => (positive_accuracy_bounds(e, p), negative_accuracy_bounds(e, p)),
        Err(_) => {
            let full = BoundInterval {
                lower: Probability::ZERO,
                upper: Probability::ONE,
            };
            (full, full)
        }
    }
}

/// Computes every posterior `P(x_i ∈ D | S = k)` exactly and checks it against
/// the positive and negative intervals at the mechanism's own ε.
///
/// Outcomes with zero marginal probability are listed in `skipped_outcomes`.
/// Reports are ordered by outcome, then point.
pub fn verify_bounds(u: &Universe, m: &FiniteMechanism) -> Result<BoundVerification> {
    let oracle = ExactOracle::new(u, m)?;
    let eps = mechanism_epsilon(m);
    let ivs: Vec<_> = u.probs().iter().map(|&p| intervals(eps, p)).collect();
    let per_outcome: Vec<Option<Vec<PosteriorReport>>> = (0..m.outcome_count())
        .into_par_iter()
        .map(|k| match oracle.posteriors(k) {
            Ok(post) => Ok(Some(
                post.iter()
                    .enumerate()
                    .map(|(i, &q)| {
                        let (pos, neg) = ivs[i];
                        PosteriorReport {
                            point_index: i,
                            outcome_id: k,
                            prior: u.prob(i),
                            posterior: Probability::saturating(q),
                            bound_interval: pos,
                            inside: pos.contains(q, BOUND_TOL),
                            negative_interval: neg,
                            negative_inside: neg.contains(1.0 - q, BOUND_TOL),
                        }
                    })
                    .collect(),
            )),
            Err(Error::ZeroProbabilityOutcome { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut skipped_outcomes = Vec::new();
    let mut reports = Vec::new();
    for (k, r) in per_outcome.into_iter().enumerate() {
        match r {
            Some(rs) => reports.extend(rs),
            None => skipped_outcomes.push(k),
        }
    }
    Ok(BoundVerification {
        eps,
        skipped_outcomes,
        reports,
    })
}
