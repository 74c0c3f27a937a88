use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::logspace::log_sum_exp;
use crate::prob::Probability;

use super::universe::{Universe, MAX_POINTS};

/// Largest `2^N * K` table the oracle will hold (128 MiB of `f64`).
pub const MAX_TABLE_ENTRIES: usize = 1 << 24;

/// Row-normalisation tolerance on `Σ_k P(k | D)`.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A training function with finitely many outcomes, as a `2^N × K` table of
/// log-probabilities. Row `mask` is the outcome distribution on dataset `mask`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMechanism {
    points: usize,
    outcome_count: usize,
    log_table: Vec<f64>,
}

fn check_shape(points: usize, rows: usize, outcomes: usize) -> Result<()> {
    if points == 0 || points > MAX_POINTS {
        return Err(Error::param(
            "points",
            format!("must be in 1..={MAX_POINTS}, got {points}"),
        ));
    }
    if rows != 1 << points {
        return Err(Error::DimensionMismatch(format!(
            "{rows} rows supplied, a {points}-point universe needs {}",
            1usize << points
        )));
    }
    if outcomes < 2 {
        return Err(Error::param(
            "outcomes",
            format!("need at least 2 outcomes, got {outcomes}"),
        ));
    }
    if rows.saturating_mul(outcomes) > MAX_TABLE_ENTRIES {
        return Err(Error::param(
            "outcomes",
            format!("table of {rows} x {outcomes} exceeds {MAX_TABLE_ENTRIES} entries"),
        ));
    }
    Ok(())
}

impl FiniteMechanism {
    /// Rows of log-probabilities, ascending mask order. Each row must
    /// normalise to 1 within [`NORMALIZATION_TOL`].
    pub fn from_log_rows(points: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let outcomes = rows.first().map_or(0, Vec::len);
        check_shape(points, rows.len(), outcomes)?;
        let mut log_table = Vec::with_capacity(rows.len() * outcomes);
        for (mask, row) in rows.iter().enumerate() {
            if row.len() != outcomes {
                return Err(Error::DimensionMismatch(format!(
                    "row {mask} has {} outcomes, expected {outcomes}",
                    row.len()
                )));
            }
            if row.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
                return Err(Error::param(
                    "rows",
                    format!("row {mask} has a NaN or +inf log-probability"),
                ));
            }
            let total = log_sum_exp(row).exp();
            if (total - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::param("rows", format!("row {mask} sums to {total}, not 1")));
            }
            log_table.extend_from_slice(row);
        }
        Ok(FiniteMechanism {
            points,
            outcome_count: outcomes,
            log_table,
        })
    }

    /// Rows of plain probabilities. Rows are renormalised; any row off by more
    /// than [`NORMALIZATION_TOL`] is logged.
    pub fn from_prob_rows(points: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let outcomes = rows.first().map_or(0, Vec::len);
        check_shape(points, rows.len(), outcomes)?;
        let mut log_table = Vec::with_capacity(rows.len() * outcomes);
        for (mask, row) in rows.iter().enumerate() {
            if row.len() != outcomes {
                return Err(Error::DimensionMismatch(format!(
                    "row {mask} has {} outcomes, expected {outcomes}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::param(
                    "rows",
                    format!("row {mask} has a negative or non-finite entry"),
                ));
            }
            let total: f64 = row.iter().sum();
            if total <= 0.0 {
                return Err(Error::param("rows", format!("row {mask} has zero total mass")));
            }
            if (total - 1.0).abs() > NORMALIZATION_TOL {
                log::warn!("mechanism row {mask} sums to {total}; renormalising");
            }
            log_table.extend(row.iter().map(|v| (v / total).ln()));
        }
        Ok(FiniteMechanism {
            points,
            outcome_count: outcomes,
            log_table,
        })
    }

    /// Every dataset produces the same outcome distribution.
    pub fn data_independent(points: usize, dist: &[f64]) -> Result<Self> {
        if points == 0 || points > MAX_POINTS {
            return Err(Error::param(
                "points",
                format!("must be in 1..={MAX_POINTS}, got {points}"),
            ));
        }
        let rows = vec![dist.to_vec(); 1 << points];
        Self::from_prob_rows(points, &rows)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn outcome_count(&self) -> usize {
        self.outcome_count
    }

    pub fn mask_count(&self) -> usize {
        1 << self.points
    }

    pub fn row(&self, mask: usize) -> &[f64] {
        let k = self.outcome_count;
        &self.log_table[mask * k..(mask + 1) * k]
    }

    pub fn log_prob(&self, mask: usize, outcome: usize) -> f64 {
        self.log_table[mask * self.outcome_count + outcome]
    }

    pub(crate) fn check_universe(&self, u: &Universe) -> Result<()> {
        if u.len() == self.points {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "mechanism covers {} points, universe has {}",
                self.points,
                u.len()
            )))
        }
    }

    pub(crate) fn check_outcome(&self, outcome: usize) -> Result<()> {
        if outcome < self.outcome_count {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "outcome {outcome} out of range for {} outcomes",
                self.outcome_count
            )))
        }
    }
}

/// Per-bit randomized response over the whole membership vector.
///
/// Outcomes are the `2^N` noisy vectors; each true bit is reported with
/// probability `1 - ρ` and flipped with probability `ρ`, independently. Limited
/// to `N <= 12` by [`MAX_TABLE_ENTRIES`].
pub fn randomized_response_mechanism(u: &Universe, flip_prob: Probability) -> Result<FiniteMechanism> {
    let rho = flip_prob.value();
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::param("flip_prob", format!("must lie in (0, 0.5), got {rho}")));
    }
    let n = u.len();
    let masks = 1usize << n;
    check_shape(n, masks, masks)?;
    let (log_flip, log_keep) = (rho.ln(), (-rho).ln_1p());
    let by_flips: Vec<f64> = (0..=n)
        .map(|h| h as f64 * log_flip + (n - h) as f64 * log_keep)
        .collect();
    let mut log_table = Vec::with_capacity(masks * masks);
    for mask in 0..masks {
        log_table.extend((0..masks).map(|out| by_flips[(mask ^ out).count_ones() as usize]));
    }
    Ok(FiniteMechanism {
        points: n,
        outcome_count: masks,
        log_table,
    })
}

/// Smallest ε for which the mechanism is ε-DP.
///
/// Adjacent datasets differ in one point. For finite outcome sets the worst
/// case over all outcome sets `S` is attained at a singleton, because a ratio
/// of sums is bounded by the largest ratio of its terms, so scanning
/// `|ln P(k|D) - ln P(k|D')|` over adjacent pairs and outcomes is exact.
/// Returns `f64::INFINITY` when some outcome is possible under one dataset but
/// impossible under an adjacent one.
pub fn mechanism_epsilon(m: &FiniteMechanism) -> f64 {
    (0..m.mask_count())
        .into_par_iter()
        .map(|mask| {
            let mut worst: f64 = 0.0;
            for bit in 0..m.points {
                if mask & (1 << bit) != 0 {
                    continue;
                }
                let (a, b) = (m.row(mask), m.row(mask | (1 << bit)));
                for (&x, &y) in a.iter().zip(b) {
                    let gap = match (x == f64::NEG_INFINITY, y == f64::NEG_INFINITY) {
                        (true, true) => 0.0,
                        (true, false) | (false, true) => f64::INFINITY,
                        (false, false) => (x - y).abs(),
                    };
                    worst = worst.max(gap);
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}
