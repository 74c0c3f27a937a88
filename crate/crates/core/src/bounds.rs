//! Closed-form bounds on membership-inference accuracy for ε-DP training.
//!
//! The central object is the posterior `P(x* ∈ D | S)` of a point `x*` that was
//! drawn into the training set with prior probability `p`. If training is ε-DP,
//! that posterior lies in
//!
//! ```text
//! [ 1 / (1 + e^{ε}(1-p)/p),  1 / (1 + e^{-ε}(1-p)/p) ]
//! ```
//!
//! regardless of the attack. Negative accuracy (predicting non-membership) is
//! the complement. Everything here is evaluated as `sigmoid(logit(p) ± ε)` so
//! large ε and extreme priors neither overflow nor lose the small end.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logspace::{logit, sigmoid};
use crate::prob::{Epsilon, Probability};

/// A `[lower, upper]` pair of probabilities with `lower <= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInterval {
    pub lower: Probability,
    pub upper: Probability,
}

impl BoundInterval {
    pub fn new(lower: Probability, upper: Probability) -> Result<Self> {
        if lower > upper {
            return Err(Error::param(
                "interval",
                format!("lower {} exceeds upper {}", lower.value(), upper.value()),
            ));
        }
        Ok(BoundInterval { lower, upper })
    }

    fn from_raw(lower: f64, upper: f64) -> Self {
        let lower = Probability::saturating(lower);
        let upper = Probability::saturating(upper);
        debug_assert!(lower <= upper);
        BoundInterval { lower, upper }
    }

    fn point(p: f64) -> Self {
        Self::from_raw(p, p)
    }

    pub fn width(&self) -> f64 {
        self.upper.value() - self.lower.value()
    }

    /// Containment with an absolute slack on both ends.
    pub fn contains(&self, value: f64, tol: f64) -> bool {
        self.lower.value() - tol <= value && value <= self.upper.value() + tol
    }
}

/// Bounds on positive accuracy `P(x* ∈ D | S)`.
///
/// `p = 0` and `p = 1` return the degenerate intervals `[0, 0]` and `[1, 1]`,
/// and `ε = 0` collapses the interval onto the prior.
pub fn positive_accuracy_bounds(eps: Epsilon, p: Probability) -> BoundInterval {
    let p = p.value();
    if p == 0.0 || p == 1.0 || eps.value() == 0.0 {
        return BoundInterval::point(p);
    }
    let l = logit(p);
    let e = eps.value();
    BoundInterval::from_raw(sigmoid(l - e), sigmoid(l + e))
}

/// Bounds on negative accuracy `P(x* ∉ D | S)`.
///
/// Each end is the complement of the opposite end of
/// [`positive_accuracy_bounds`].
pub fn negative_accuracy_bounds(eps: Epsilon, p: Probability) -> BoundInterval {
    let q = p.complement().value();
    if q == 0.0 || q == 1.0 || eps.value() == 0.0 {
        return BoundInterval::point(q);
    }
    let l = -logit(p.value());
    let e = eps.value();
    BoundInterval::from_raw(sigmoid(l - e), sigmoid(l + e))
}

/// Bound on the accuracy of any attack, i.e. the `p = 0.5` case where the
/// positive and negative intervals coincide.
pub fn attack_accuracy_bound(eps: Epsilon) -> BoundInterval {
    positive_accuracy_bounds(eps, Probability::HALF)
}

/// `e^ε / 2` without clamping; exceeds 1 once `ε > ln 2`.
pub fn yeom_raw(eps: Epsilon) -> f64 {
    eps.value().exp() / 2.0
}

pub fn baseline_yeom(eps: Epsilon) -> Probability {
    Probability::saturating(yeom_raw(eps).min(1.0))
}

/// `1 - e^{-ε} / 2`, the pure-DP case of the TPR/FPR based accuracy bound.
///
/// At `ε = 2` this is 0.9323.
pub fn baseline_erlingsson(eps: Epsilon) -> Probability {
    Probability::saturating(1.0 - (-eps.value()).exp() / 2.0)
}

/// `p + ε / 4` without clamping.
pub fn sablayrolles_raw(eps: Epsilon, p: Probability) -> f64 {
    p.value() + eps.value() / 4.0
}

pub fn baseline_sablayrolles(eps: Epsilon, p: Probability) -> Probability {
    Probability::saturating(sablayrolles_raw(eps, p).min(1.0))
}

/// One row of the baseline comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaselineComparison {
    pub eps: f64,
    pub prior: f64,
    pub ours: f64,
    pub yeom: f64,
    pub yeom_raw: f64,
    pub erlingsson: f64,
    pub sablayrolles: f64,
    pub sablayrolles_raw: f64,
}

pub fn compare_baselines(eps: Epsilon, p: Probability) -> BaselineComparison {
    BaselineComparison {
        eps: eps.value(),
        prior: p.value(),
        ours: positive_accuracy_bounds(eps, p).upper.value(),
        yeom: baseline_yeom(eps).value(),
        yeom_raw: yeom_raw(eps),
        erlingsson: baseline_erlingsson(eps).value(),
        sablayrolles: baseline_sablayrolles(eps, p).value(),
        sablayrolles_raw: sablayrolles_raw(eps, p),
    }
}

fn require_interior(name: &'static str, p: Probability) -> Result<f64> {
    if p.is_interior() {
        Ok(p.value())
    } else {
        Err(Error::param(name, format!("must lie in (0, 1), got {}", p.value())))
    }
}

/// Upper bound on positive advantage, `2 (UB(ε, p) - p)`.
pub fn mi_advantage_upper(eps: Epsilon, p: Probability) -> Result<f64> {
    let pv = require_interior("prior", p)?;
    if eps.value() == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * (positive_accuracy_bounds(eps, p).upper.value() - pv))
}

/// Grid search for the prior with the largest advantage bound.
///
/// The grid is `i / (grid_size + 1)` for `i = 1..=grid_size`; ties go to the
/// smaller prior.
pub fn advantage_maximizing_prior(eps: Epsilon, grid_size: usize) -> Result<Probability> {
    if grid_size < 3 {
        return Err(Error::param(
            "grid_size",
            format!("needs at least 3 points, got {grid_size}"),
        ));
    }
    let denom = (grid_size + 1) as f64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 1..=grid_size {
        let p = i as f64 / denom;
        let adv = mi_advantage_upper(eps, Probability::saturating(p))?;
        if adv > best.0 {
            best = (adv, p);
        }
    }
    Ok(Probability::saturating(best.1))
}

/// Loss cap and observed generalization gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneralizationParams {
    loss_bound: f64,
    gap: f64,
}

impl GeneralizationParams {
    pub fn new(loss_bound: f64, gap: f64) -> Result<Self> {
        if !(loss_bound.is_finite() && loss_bound > 0.0) {
            return Err(Error::param(
                "loss_bound",
                format!("must be positive and finite, got {loss_bound}"),
            ));
        }
        if !gap.is_finite() || gap.abs() > loss_bound {
            return Err(Error::param(
                "gap",
                format!("|gap| must not exceed the loss bound {loss_bound}, got {gap}"),
            ));
        }
        Ok(GeneralizationParams { loss_bound, gap })
    }

    pub fn loss_bound(&self) -> f64 {
        self.loss_bound
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }
}

/// Closed real interval for the generalization gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapInterval {
    pub lower: f64,
    pub upper: f64,
}

impl GapInterval {
    pub fn contains(&self, gap: f64) -> bool {
        self.lower <= gap && gap <= self.upper
    }
}

/// Admissible generalization gaps for an ε-DP learner with loss in `[0, B]`.
///
/// The threshold adversary that guesses from the loss has accuracy
/// `(R_g / B + 1) / 2`, which must sit inside [`attack_accuracy_bound`]. Solving
/// for `R_g` gives `|R_g| <= B (2 / (1 + e^{-ε}) - 1) = B tanh(ε / 2)`.
pub fn generalization_gap_interval(eps: Epsilon, gp: &GeneralizationParams) -> GapInterval {
    let half_width = gp.loss_bound * (eps.value() / 2.0).tanh();
    GapInterval {
        lower: -half_width,
        upper: half_width,
    }
}

/// Batch sampling rate and per-step budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationParams {
    batch_rate: f64,
    eps0: Epsilon,
}

impl AmplificationParams {
    pub fn new(batch_rate: f64, eps0: Epsilon) -> Result<Self> {
        if !(batch_rate > 0.0 && batch_rate <= 1.0) {
            return Err(Error::param(
                "batch_rate",
                format!("must lie in (0, 1], got {batch_rate}"),
            ));
        }
        Ok(AmplificationParams { batch_rate, eps0 })
    }

    pub fn batch_rate(&self) -> f64 {
        self.batch_rate
    }

    pub fn eps0(&self) -> Epsilon {
        self.eps0
    }
}

/// `e^{-q ε₀} (1 - p) / p`, the term whose growth drives the upper bound down.
pub fn amplified_term(ap: &AmplificationParams, p: Probability) -> Result<f64> {
    let pv = require_interior("prior", p)?;
    Ok((-ap.batch_rate * ap.eps0.value()).exp() * (1.0 - pv) / pv)
}

/// Growth of the amplified term under batch sampling (`e^{-t}`) versus
/// dataset sub-sampling (`(1 - t) / t`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationFactors {
    pub batch: f64,
    pub dataset: f64,
}

pub fn amplification_factors(t: f64) -> Result<AmplificationFactors> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::param("t", format!("must lie in (0, 1), got {t}")));
    }
    Ok(AmplificationFactors {
        batch: (-t).exp(),
        dataset: (1.0 - t) / t,
    })
}

/// The unique `t*` in `(0, 1)` with `(1 - t) / t = e^{-t}`.
///
/// `g(t) = (1 - t)/t - e^{-t}` has `g' = e^{-t} - 1/t² < 0` on `(0, 1)`, so
/// Newton's method from the midpoint converges monotonically.
pub fn amplification_crossing() -> Result<f64> {
    let mut t: f64 = 0.5;
    for _ in 0..100 {
        let g = (1.0 - t) / t - (-t).exp();
        let dg = (-t).exp() - 1.0 / (t * t);
        let next = t - g / dg;
        if (next - t).abs() <= 4.0 * f64::EPSILON {
            return Ok(next);
        }
        t = next;
    }
    Err(Error::NoConvergence("amplification crossing".into()))
}
