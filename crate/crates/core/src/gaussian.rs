//! One-step DP-SGD threshold attack, evaluated analytically.
//!
//! Two candidate training sets: `D1 = {x1}` and `D2 = {x1, x2}`. After one
//! noisy step the final weight is `N(w0, σ)` under `D1` and `N(w0 - g, σ)` under
//! `D2`, where `g` is the clipped gradient. The attacker says "x2 was trained
//! on" iff the weight is `<= α`.
//!
//! The positive accuracy of that attack tends to 1 as `α → -∞`, so no bound
//! below 1 holds for (ε, δ)-DP. The overall accuracy, by contrast, peaks at the
//! midpoint threshold. All weights are stored as offsets from `w0`: near `10^6`
//! with `σ ≈ 4` absolute coordinates would waste six significant digits.

use std::f64::consts::{LN_2, PI, SQRT_2};

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::logspace::posterior_from_log_weights;
use crate::prob::Probability;

/// Below this, `log_gaussian_cdf` switches to the asymptotic tail series.
const TAIL_SWITCH: f64 = -8.0;

/// Standard normal CDF.
///
/// Uses `erfc` on `[-8, ∞)` and `exp` of the tail series below. Results below
/// `z ≈ -37.5` are subnormal or zero; use [`log_gaussian_cdf`] there.
pub fn gaussian_cdf(z: f64) -> f64 {
    if z < TAIL_SWITCH {
        log_gaussian_cdf(z).exp()
    } else {
        0.5 * erfc(-z / SQRT_2)
    }
}

/// `ln Φ(z)`, accurate in the far lower tail.
///
/// For `z < -8`: `ln Φ(z) = -z²/2 - ln(-z) - ln(2π)/2 + ln Σ_k (-1)^k (2k-1)!! / z^{2k}`,
/// summed until the terms stop shrinking.
pub fn log_gaussian_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if z > 0.0 {
        return (-gaussian_cdf(-z)).ln_1p();
    }
    if z >= TAIL_SWITCH {
        return (erfc(-z / SQRT_2)).ln() - LN_2;
    }
    let inv_z2 = 1.0 / (z * z);
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut k = 1.0;
    loop {
        let next = -term * (2.0 * k - 1.0) * inv_z2;
        if next.abs() >= term.abs() || next.abs() < 1e-17 {
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    -0.5 * z * z - (-z).ln() - 0.5 * (2.0 * PI).ln() + sum.ln()
}

/// A normal distribution stored relative to the initial weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianDist {
    pub mean_offset: f64,
    pub sigma: f64,
}

impl GaussianDist {
    pub fn new(mean_offset: f64, sigma: f64) -> Result<Self> {
        if !mean_offset.is_finite() {
            return Err(Error::param("mean_offset", "must be finite"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::param(
                "sigma",
                format!("must be positive and finite, got {sigma}"),
            ));
        }
        Ok(GaussianDist { mean_offset, sigma })
    }

    fn z(&self, x: f64) -> f64 {
        (x - self.mean_offset) / self.sigma
    }

    /// `P(W <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        gaussian_cdf(self.z(x))
    }

    pub fn log_cdf(&self, x: f64) -> f64 {
        log_gaussian_cdf(self.z(x))
    }

    /// `P(W > x)`.
    pub fn sf(&self, x: f64) -> f64 {
        gaussian_cdf(-self.z(x))
    }
}

/// The one-step DP-SGD setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleConfig {
    pub w0: f64,
    pub grad_step: f64,
    pub sigma: f64,
    pub prior_x2: Probability,
}

impl Default for CounterexampleConfig {
    /// `w0 = 10^6`, unit clipped step, `σ = 4.0412` (the noise for (1, 1e-5)-DP
    /// at full batch, one step), and `P(x2 ∈ D) = 0.5`.
    fn default() -> Self {
        CounterexampleConfig {
            w0: 1e6,
            grad_step: 1.0,
            sigma: 4.0412,
            prior_x2: Probability::HALF,
        }
    }
}

impl CounterexampleConfig {
    pub fn new(w0: f64, grad_step: f64, sigma: f64, prior_x2: Probability) -> Result<Self> {
        if !w0.is_finite() {
            return Err(Error::param("w0", "must be finite"));
        }
        if !(grad_step.is_finite() && grad_step > 0.0) {
            return Err(Error::param(
                "grad_step",
                format!("must be positive and finite, got {grad_step}"),
            ));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::param(
                "sigma",
                format!("must be positive and finite, got {sigma}"),
            ));
        }
        Ok(CounterexampleConfig {
            w0,
            grad_step,
            sigma,
            prior_x2,
        })
    }

    /// Final-weight distribution when trained on `{x1}` only.
    pub fn weights_without_x2(&self) -> GaussianDist {
        GaussianDist {
            mean_offset: 0.0,
            sigma: self.sigma,
        }
    }

    /// Final-weight distribution when trained on `{x1, x2}`.
    pub fn weights_with_x2(&self) -> GaussianDist {
        GaussianDist {
            mean_offset: -self.grad_step,
            sigma: self.sigma,
        }
    }
}

/// Classify "x2 present" iff `W <= w0 + alpha_offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdAttack {
    pub alpha_offset: f64,
}

impl ThresholdAttack {
    pub fn new(alpha_offset: f64) -> Result<Self> {
        if alpha_offset.is_finite() {
            Ok(ThresholdAttack { alpha_offset })
        } else {
            Err(Error::param("alpha", "threshold must be finite"))
        }
    }

    pub fn absolute(&self, cfg: &CounterexampleConfig) -> f64 {
        cfg.w0 + self.alpha_offset
    }
}

/// `P(D2 | W <= α)`, from log-CDFs so it stays finite deep in the tail.
pub fn positive_accuracy(attack: ThresholdAttack, cfg: &CounterexampleConfig) -> Probability {
    let a = attack.alpha_offset;
    let pi = cfg.prior_x2.value();
    let with = pi.ln() + cfg.weights_with_x2().log_cdf(a);
    let without = (1.0 - pi).ln() + cfg.weights_without_x2().log_cdf(a);
    Probability::saturating(posterior_from_log_weights(with, without).unwrap_or(pi))
}

/// Finds a threshold whose positive accuracy exceeds `m`, doubling the
/// distance below `w0` from `-g/2` until it does.
pub fn positive_accuracy_supremum_demo(cfg: &CounterexampleConfig, m: Probability) -> Result<ThresholdAttack> {
    if m.value() >= 1.0 {
        return Err(Error::param("m", "target must be below 1"));
    }
    let mut alpha = -cfg.grad_step / 2.0;
    for _ in 0..2048 {
        let attack = ThresholdAttack::new(alpha)?;
        if positive_accuracy(attack, cfg) > m {
            return Ok(attack);
        }
        alpha *= 2.0;
        if !alpha.is_finite() {
            break;
        }
    }
    Err(Error::NoConvergence(format!(
        "no threshold reached positive accuracy {}",
        m.value()
    )))
}

/// `P(correct)` = `P(D1) P(W > α | D1) + P(D2) P(W <= α | D2)`.
pub fn overall_accuracy(attack: ThresholdAttack, cfg: &CounterexampleConfig) -> Probability {
    let a = attack.alpha_offset;
    let pi = cfg.prior_x2.value();
    Probability::saturating((1.0 - pi) * cfg.weights_without_x2().sf(a) + pi * cfg.weights_with_x2().cdf(a))
}

/// Golden-section search for the best threshold over `α ∈ [-10σ, 10σ]`.
pub fn max_overall_accuracy(cfg: &CounterexampleConfig) -> (ThresholdAttack, Probability) {
    let f = |a: f64| overall_accuracy(ThresholdAttack { alpha_offset: a }, cfg).value();
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (-10.0 * cfg.sigma, 10.0 * cfg.sigma);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if hi - lo <= 1e-12 * cfg.sigma {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let alpha = 0.5 * (lo + hi);
    let attack = ThresholdAttack { alpha_offset: alpha };
    (attack, overall_accuracy(attack, cfg))
}
