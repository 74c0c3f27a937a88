use serde::Serialize;

use crate::error::{Error, Result};

/// A labelled curve: strictly increasing, finite `x` and finite `y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSeries {
    label: String,
    x_name: String,
    y_name: String,
    points: Vec<(f64, f64)>,
}

impl CurveSeries {
    pub fn new(
        label: impl Into<String>,
        x_name: impl Into<String>,
        y_name: impl Into<String>,
        points: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let label = label.into();
        if let Some((i, _)) = points
            .iter()
            .enumerate()
            .find(|(_, (x, y))| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::param(
                "points",
                format!("series `{label}` has a non-finite value at index {i}"),
            ));
        }
        if let Some(i) = points.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(Error::param(
                "points",
                format!(
                    "series `{label}` x values are not strictly increasing at index {}",
                    i + 1
                ),
            ));
        }
        Ok(CurveSeries {
            label,
            x_name: x_name.into(),
            y_name: y_name.into(),
            points,
        })
    }

    /// Evaluates `f` on every grid point.
    pub fn from_fn<F>(
        label: impl Into<String>,
        x_name: impl Into<String>,
        y_name: impl Into<String>,
        grid: &[f64],
        mut f: F,
    ) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let points = grid.iter().map(|&x| f(x).map(|y| (x, y))).collect::<Result<Vec<_>>>()?;
        Self::new(label, x_name, y_name, points)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn x_name(&self) -> &str {
        &self.x_name
    }

    pub fn y_name(&self) -> &str {
        &self.y_name
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when both series sample exactly the same `x` values.
    pub fn same_grid(&self, other: &CurveSeries) -> bool {
        self.len() == other.len() && self.xs().zip(other.xs()).all(|(a, b)| a == b)
    }
}
