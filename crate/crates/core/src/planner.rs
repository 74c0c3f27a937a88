//! Dataset sub-sampling as a defence.
//!
//! Keeping every point of an arbitrary dataset independently with probability
//! `T` caps each point's inclusion prior at `T`, whatever the distribution of
//! the original dataset was. Because the positive-accuracy upper bound is
//! increasing in the prior, the bound evaluated at `T` is a certified cap on
//! any attacker's positive accuracy.

use std::collections::HashSet;
use std::fmt::Display;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::positive_accuracy_bounds;
use crate::error::{Error, Result};
use crate::logspace::{logit, sigmoid};
use crate::prob::{Epsilon, Probability};

/// Per-point keep probability `T`, in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(into = "f64")]
pub struct SubsampleRate(f64);

impl SubsampleRate {
    pub const FULL: SubsampleRate = SubsampleRate(1.0);

    pub fn new(t: f64) -> Result<Self> {
        if t > 0.0 && t <= 1.0 {
            Ok(SubsampleRate(t))
        } else {
            Err(Error::param(
                "rate",
                format!("keep probability must lie in (0, 1], got {t}"),
            ))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<SubsampleRate> for f64 {
    fn from(r: SubsampleRate) -> f64 {
        r.0
    }
}

/// The prior cap certified by sub-sampling at `rate`: every point of the
/// superset ends up in the training set with probability at most `T`.
pub fn certified_prior_cap(rate: SubsampleRate) -> Probability {
    Probability::saturating(rate.0)
}

/// Bernoulli sub-sampling with a reproducible stream.
///
/// The generator is ChaCha8 seeded with `seed` through `seed_from_u64`. Exactly
/// one uniform `f64` in `[0, 1)` is drawn per id, in input order, and the id is
/// kept iff the draw is `< T`. The output keeps the input order.
pub fn subsample<T>(ids: &[T], rate: SubsampleRate, seed: u64) -> Result<Vec<T>>
where
    T: Clone + Eq + Hash + Display,
{
    if ids.is_empty() {
        return Err(Error::param("ids", "at least one identifier is required"));
    }
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = rate.0;
    Ok(ids.iter().filter(|_| rng.random::<f64>() < t).cloned().collect())
}

/// Largest keep rate whose certified positive-accuracy bound does not exceed
/// `target_upper`.
///
/// Inverts the upper bound: `T = 1 / (1 + e^ε (1/target - 1))`, then steps
/// down by ulps until the forward bound is `<= target` in floating point.
pub fn max_rate_for_target(eps: Epsilon, target_upper: Probability) -> Result<SubsampleRate> {
    if !target_upper.is_interior() {
        return Err(Error::param(
            "target",
            format!("must lie in (0, 1), got {}", target_upper.value()),
        ));
    }
    let target = target_upper.value();
    let mut t = sigmoid(logit(target) - eps.value()).min(1.0);
    let upper = |t: f64| positive_accuracy_bounds(eps, Probability::saturating(t)).upper.value();
    while t > 0.0 && upper(t) > target {
        t = t.next_down();
    }
    if t <= 0.0 {
        return Err(Error::param(
            "target",
            format!("no positive keep rate reaches {target} at eps = {}", eps.value()),
        ));
    }
    SubsampleRate::new(t)
}

/// As [`max_rate_for_target`] when each point was already drawn with
/// probability at most `base_prior`; the rate is capped at 1.
pub fn max_rate_for_target_with_base_prior(
    eps: Epsilon,
    target_upper: Probability,
    base_prior: Probability,
) -> Result<SubsampleRate> {
    if base_prior.value() == 0.0 {
        return Err(Error::param("base_prior", "must be positive"));
    }
    let effective = max_rate_for_target(eps, target_upper)?.value();
    let b = base_prior.value();
    let upper = |t: f64| {
        positive_accuracy_bounds(eps, Probability::saturating(b * t))
            .upper
            .value()
    };
    let mut t = (effective / b).min(1.0);
    while t > 0.0 && upper(t) > target_upper.value() {
        t = t.next_down();
    }
    SubsampleRate::new(t)
}

/// A defender's sub-sampling decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsamplePlan {
    pub rate: SubsampleRate,
    pub eps: Epsilon,
    /// Known cap on each point's inclusion probability before sub-sampling.
    pub base_prior: Probability,
    pub certified_upper: Probability,
    pub expected_size: f64,
    pub original_size: u64,
}

/// Certified cap and expected training-set size for sub-sampling `n` points at
/// `rate`, with nothing known about how the original dataset was drawn.
pub fn plan(eps: Epsilon, rate: SubsampleRate, original_size: u64) -> SubsamplePlan {
    plan_with_base_prior(eps, rate, original_size, Probability::ONE)
}

/// As [`plan`], but each point was already in the original dataset with
/// probability at most `base_prior`, so the effective prior is
/// `base_prior * T`. The utility cost of the smaller set is not modelled.
pub fn plan_with_base_prior(
    eps: Epsilon,
    rate: SubsampleRate,
    original_size: u64,
    base_prior: Probability,
) -> SubsamplePlan {
    let effective = Probability::saturating(base_prior.value() * certified_prior_cap(rate).value());
    SubsamplePlan {
        rate,
        eps,
        base_prior,
        certified_upper: positive_accuracy_bounds(eps, effective).upper,
        expected_size: original_size as f64 * rate.0,
        original_size,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(v: f64) -> Epsilon {
        Epsilon::new(v).unwrap()
    }

    #[test]
    fn rate_validation() {
        assert!(SubsampleRate::new(0.0).is_err());
        assert!(SubsampleRate::new(1.0).is_ok());
        assert!(SubsampleRate::new(1.01).is_err());
        assert!(SubsampleRate::new(f64::NAN).is_err());
    }

    #[test]
    fn prior_cap_is_rate() {
        for t in [1.0, 0.01, 0.5] {
            assert_eq!(certified_prior_cap(SubsampleRate::new(t).unwrap()).value(), t);
        }
    }

    #[test]
    fn full_rate_keeps_everything() {
        let ids: Vec<u32> = (0..100).collect();
        assert_eq!(subsample(&ids, SubsampleRate::FULL, 99).unwrap(), ids);
    }

    #[test]
    fn kept_count_concentrates() {
        let ids: Vec<u32> = (0..10_000).collect();
        let kept = subsample(&ids, SubsampleRate::new(0.3).unwrap(), 7).unwrap();
        let sd = (10_000.0_f64 * 0.3 * 0.7).sqrt();
        assert!((kept.len() as f64 - 3000.0).abs() <= 4.0 * sd, "kept {}", kept.len());
        // order preserved
        assert!(kept.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn seeded_determinism() {
        let ids: Vec<String> = (0..500).map(|i| format!("id-{i}")).collect();
        let r = SubsampleRate::new(0.5).unwrap();
        assert_eq!(subsample(&ids, r, 11).unwrap(), subsample(&ids, r, 11).unwrap());
        assert_ne!(subsample(&ids, r, 11).unwrap(), subsample(&ids, r, 12).unwrap());
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        let r = SubsampleRate::new(0.5).unwrap();
        assert!(matches!(subsample(&[1, 2, 1], r, 0), Err(Error::DuplicateId(s)) if s == "1"));
        assert!(subsample::<u8>(&[], r, 0).is_err());
    }

    #[test]
    fn inversion_examples() {
        let six_nine = positive_accuracy_bounds(eps(2.0), Probability::new(0.01).unwrap()).upper;
        let t = max_rate_for_target(eps(2.0), six_nine).unwrap().value();
        assert!((t - 0.01).abs() < 1e-12);

        let t = max_rate_for_target(Epsilon::ZERO, Probability::new(0.25).unwrap()).unwrap();
        assert_eq!(t.value(), 0.25);

        let t = max_rate_for_target(eps(1.0), Probability::new(0.7311).unwrap()).unwrap();
        assert!((t.value() - 0.5).abs() < 1e-4);
        let exact = positive_accuracy_bounds(eps(1.0), Probability::HALF).upper;
        let t = max_rate_for_target(eps(1.0), exact).unwrap();
        assert!((t.value() - 0.5).abs() < 1e-6);

        assert!(max_rate_for_target(eps(1.0), Probability::ZERO).is_err());
        assert!(max_rate_for_target(eps(1.0), Probability::ONE).is_err());
    }

    #[test]
    fn inversion_with_base_prior() {
        let target = Probability::new(0.3).unwrap();
        let half = Probability::HALF;
        let t = max_rate_for_target_with_base_prior(eps(1.0), target, half)
            .unwrap()
            .value();
        let plain = max_rate_for_target(eps(1.0), target).unwrap().value();
        assert!((t - 2.0 * plain).abs() < 1e-12);
        let p = plan_with_base_prior(eps(1.0), SubsampleRate::new(t).unwrap(), 10, half);
        assert!(p.certified_upper.value() <= 0.3);
        // a loose target needs no sub-sampling at all
        let t = max_rate_for_target_with_base_prior(eps(1.0), Probability::new(0.9).unwrap(), half).unwrap();
        assert_eq!(t.value(), 1.0);
    }

    #[test]
    fn plan_examples() {
        let p = plan(eps(2.0), SubsampleRate::new(0.01).unwrap(), 1_000_000);
        assert!((p.certified_upper.value() - 0.0695).abs() < 1e-3);
        assert!((p.expected_size - 10_000.0).abs() < 1e-9);

        // no sub-sampling and no knowledge of the original draw certifies nothing
        let p = plan(eps(1.0), SubsampleRate::FULL, 100);
        assert_eq!(p.certified_upper.value(), 1.0);
        let p = plan_with_base_prior(eps(1.0), SubsampleRate::FULL, 100, Probability::HALF);
        assert!((p.certified_upper.value() - 0.7311).abs() < 1e-3);
        assert_eq!(p.expected_size, 100.0);

        let p = plan(Epsilon::ZERO, SubsampleRate::new(0.2).unwrap(), 50);
        assert_eq!(p.certified_upper.value(), 0.2);
        assert_eq!(p.expected_size, 10.0);
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"rate\":0.2"));
    }
}
