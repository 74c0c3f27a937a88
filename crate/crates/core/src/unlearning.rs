//! B-MI unlearning arithmetic.
//!
//! A model is B-MI unlearnt for a set of points when the posterior probability
//! that none of them was trained on is at least `B`. With independent draws the
//! joint non-membership posterior is the product of per-point ones, so with a
//! common per-request factor `L` at most `ln B / ln L` requests can be absorbed
//! without retraining.
//!
//! With every point drawn at rate `c / N`, the factor is
//! `L(c) = 1 / (1 + e^{-ε} (c/N) / (1 - c/N))`. This coincides with the upper
//! end of [`negative_accuracy_bounds`](crate::bounds::negative_accuracy_bounds)
//! at `p = c / N`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::prob::{Epsilon, Probability};
use crate::series::CurveSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnlearningPolicy {
    threshold_b: Probability,
    eps: Epsilon,
    universe_size: u64,
    expected_train_size: f64,
}

impl UnlearningPolicy {
    pub fn new(threshold_b: Probability, eps: Epsilon, universe_size: u64, expected_train_size: f64) -> Result<Self> {
        check_threshold(threshold_b)?;
        check_train_size(expected_train_size, universe_size)?;
        Ok(UnlearningPolicy {
            threshold_b,
            eps,
            universe_size,
            expected_train_size,
        })
    }

    pub fn threshold_b(&self) -> Probability {
        self.threshold_b
    }

    pub fn eps(&self) -> Epsilon {
        self.eps
    }

    pub fn universe_size(&self) -> u64 {
        self.universe_size
    }

    pub fn expected_train_size(&self) -> f64 {
        self.expected_train_size
    }
}

fn check_threshold(b: Probability) -> Result<()> {
    if b.is_interior() {
        Ok(())
    } else {
        Err(Error::param(
            "b",
            format!("threshold must lie in (0, 1), got {}", b.value()),
        ))
    }
}

fn check_train_size(c: f64, n: u64) -> Result<()> {
    if c.is_finite() && c > 0.0 && c < n as f64 {
        Ok(())
    } else {
        Err(Error::param(
            "c",
            format!("expected training size must lie in (0, {n}), got {c}"),
        ))
    }
}

/// Per-request factor `L` and the resulting request capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityResult {
    pub per_request_lower: Probability,
    /// `ln B / ln L`; `f64::INFINITY` when `ln L` rounds to 0.
    pub capacity: f64,
    pub unbounded: bool,
}

impl CapacityResult {
    /// Whole requests, `floor(capacity)`; `None` when unbounded.
    pub fn whole_requests(&self) -> Option<u64> {
        if self.unbounded {
            None
        } else {
            Some(self.capacity.floor() as u64)
        }
    }
}

// ln L(c) = -ln(1 + e^{-ε} c / (N - c))
fn log_l_of_c(eps: Epsilon, c: f64, n: u64) -> f64 {
    let odds = c / (n as f64 - c);
    -((-eps.value()).exp() * odds).ln_1p()
}

/// `L(c)` for `N = n` points each drawn with probability `c / n`.
pub fn l_of_c(eps: Epsilon, c: f64, n: u64) -> Result<Probability> {
    check_train_size(c, n)?;
    Ok(Probability::saturating(log_l_of_c(eps, c, n).exp()))
}

pub fn deletion_capacity(policy: &UnlearningPolicy) -> CapacityResult {
    let log_l = log_l_of_c(policy.eps, policy.expected_train_size, policy.universe_size);
    let per_request_lower = Probability::saturating(log_l.exp());
    if log_l == 0.0 {
        return CapacityResult {
            per_request_lower,
            capacity: f64::INFINITY,
            unbounded: true,
        };
    }
    CapacityResult {
        per_request_lower,
        capacity: policy.threshold_b.value().ln() / log_l,
        unbounded: false,
    }
}

/// Whether the joint non-membership posterior, the product of the per-point
/// lower bounds, still reaches `b`. The empty request set passes.
pub fn group_request_check(per_point_lowers: &[Probability], threshold_b: Probability) -> Result<bool> {
    let mut log_product = 0.0;
    for (i, l) in per_point_lowers.iter().enumerate() {
        if l.value() <= 0.0 {
            return Err(Error::param("lowers", format!("entry {i} must lie in (0, 1]")));
        }
        log_product += l.value().ln();
    }
    Ok(log_product >= threshold_b.value().ln())
}

/// Capacity `m(c)` over `c_grid`, plus the line `slope * c` for comparison.
///
/// The line carries no meaning beyond showing linear growth; `slope = 1` is
/// the usual choice.
pub fn capacity_curve(
    eps: Epsilon,
    n: u64,
    b: Probability,
    c_grid: &[f64],
    slope: f64,
) -> Result<(CurveSeries, CurveSeries)> {
    check_threshold(b)?;
    if !slope.is_finite() {
        return Err(Error::param("slope", "must be finite"));
    }
    let capacity = CurveSeries::from_fn("capacity", "c", "deletions", c_grid, |c| {
        let policy = UnlearningPolicy::new(b, eps, n, c)?;
        let r = deletion_capacity(&policy);
        if r.unbounded {
            Err(Error::param("c", format!("capacity unbounded at c = {c}")))
        } else {
            Ok(r.capacity)
        }
    })?;
    let linear = CurveSeries::from_fn("linear", "c", "deletions", c_grid, |c| Ok(slope * c))?;
    Ok((capacity, linear))
}
