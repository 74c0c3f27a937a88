use serde::Serialize;

use crate::error::{Error, Result};
use crate::prob::Probability;

/// Largest universe the enumerator accepts (2^20 datasets).
pub const MAX_POINTS: usize = 20;

/// A finite point set `{x_1, ..., x_N}` with independent inclusion priors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Universe {
    probs: Vec<Probability>,
    #[serde(skip)]
    log_in: Vec<f64>,
    #[serde(skip)]
    log_out: Vec<f64>,
}

impl Universe {
    /// Every prior must lie strictly inside `(0, 1)`; a point that is always
    /// (or never) drawn carries no membership uncertainty and should be left
    /// out of the universe.
    pub fn new(probs: &[f64]) -> Result<Self> {
        if probs.is_empty() || probs.len() > MAX_POINTS {
            return Err(Error::param(
                "probs",
                format!("universe size must be in 1..={MAX_POINTS}, got {}", probs.len()),
            ));
        }
        let mut out = Vec::with_capacity(probs.len());
        for &p in probs {
            let p = Probability::named("probs", p)?;
            if !p.is_interior() {
                return Err(Error::param(
                    "probs",
                    format!("priors must lie in (0, 1), got {}", p.value()),
                ));
            }
            out.push(p);
        }
        let log_in = out.iter().map(|p| p.value().ln()).collect();
        let log_out = out.iter().map(|p| (-p.value()).ln_1p()).collect();
        Ok(Universe {
            probs: out,
            log_in,
            log_out,
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[Probability] {
        &self.probs
    }

    pub fn prob(&self, point: usize) -> Probability {
        self.probs[point]
    }

    pub fn mask_count(&self) -> usize {
        1 << self.len()
    }

    /// `ln P_{x_i}(0) - ln P_{x_i}(1)`.
    pub(crate) fn log_odds_out(&self, point: usize) -> f64 {
        self.log_out[point] - self.log_in[point]
    }

    pub(crate) fn log_prior_bits(&self, bits: u32) -> f64 {
        (0..self.len())
            .map(|i| {
                if bits & (1 << i) != 0 {
                    self.log_in[i]
                } else {
                    self.log_out[i]
                }
            })
            .sum()
    }

    /// `ln P(D)` for every mask, ascending.
    pub fn log_priors(&self) -> Vec<f64> {
        (0..self.mask_count() as u32).map(|b| self.log_prior_bits(b)).collect()
    }

    pub(crate) fn check_point(&self, point: usize) -> Result<()> {
        if point < self.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "point {point} out of range for a universe of {} points",
                self.len()
            )))
        }
    }
}

/// Dataset membership as a bitmask: bit `i` is set iff `x_i ∈ D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DatasetMask {
    bits: u32,
    width: u8,
}

impl DatasetMask {
    pub fn new(bits: u32, width: usize) -> Result<Self> {
        if width == 0 || width > MAX_POINTS {
            return Err(Error::param(
                "width",
                format!("must be in 1..={MAX_POINTS}, got {width}"),
            ));
        }
        if bits >> width != 0 {
            return Err(Error::DimensionMismatch(format!(
                "mask {bits:#b} wider than {width} bits"
            )));
        }
        Ok(DatasetMask {
            bits,
            width: width as u8,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn contains(&self, point: usize) -> bool {
        self.bits & (1 << point) != 0
    }
}

/// `ln P(D) = Σ_i ln P_{x_i}(bit_i)`.
pub fn dataset_log_prior(mask: DatasetMask, u: &Universe) -> Result<f64> {
    if mask.width() != u.len() {
        return Err(Error::DimensionMismatch(format!(
            "mask width {} does not match universe size {}",
            mask.width(),
            u.len()
        )));
    }
    Ok(u.log_prior_bits(mask.bits))
}
