//! Data series behind each figure, plus CSV and SVG export.

mod svg;
mod table;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    amplification_factors, baseline_erlingsson, baseline_sablayrolles, baseline_yeom, mi_advantage_upper,
    positive_accuracy_bounds, sablayrolles_raw, yeom_raw,
};
use crate::error::{Error, Result};
use crate::gaussian::{overall_accuracy, positive_accuracy, CounterexampleConfig, ThresholdAttack};
use crate::prob::{Epsilon, Probability};
use crate::series::CurveSeries;
use crate::unlearning::capacity_curve;

pub use svg::{render_svg, write_svg, write_svg_with, SvgOptions};
pub use table::{write_csv, CsvOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureId {
    MiBounds,
    MiBoundProb,
    PrivAmpComp,
    ThresholdPosAcc,
    ThresholdAcc,
    SabComparison,
    MiAdv,
    DelCapacity,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::MiBounds,
        FigureId::MiBoundProb,
        FigureId::PrivAmpComp,
        FigureId::ThresholdPosAcc,
        FigureId::ThresholdAcc,
        FigureId::SabComparison,
        FigureId::MiAdv,
        FigureId::DelCapacity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::MiBounds => "mi_bounds",
            FigureId::MiBoundProb => "mi_bound_prob",
            FigureId::PrivAmpComp => "priv_amp_comp",
            FigureId::ThresholdPosAcc => "threshold_pos_acc",
            FigureId::ThresholdAcc => "threshold_acc",
            FigureId::SabComparison => "sab_comparison",
            FigureId::MiAdv => "mi_adv",
            FigureId::DelCapacity => "del_capacity",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            FigureId::MiBounds => "Attack accuracy bounds at p = 0.5",
            FigureId::MiBoundProb => "Positive accuracy bounds vs. sampling probability",
            FigureId::PrivAmpComp => "Batch vs. dataset sampling amplification",
            FigureId::ThresholdPosAcc => "Threshold attack positive accuracy",
            FigureId::ThresholdAcc => "Threshold attack accuracy",
            FigureId::SabComparison => "Upper bound vs. Sablayrolles et al. by sampling probability",
            FigureId::MiAdv => "Positive advantage bound vs. sampling probability",
            FigureId::DelCapacity => "Deletion capacity vs. expected training size",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL.into_iter().find(|id| id.as_str() == s).ok_or_else(|| {
            let known: Vec<_> = FigureId::ALL.iter().map(|id| id.as_str()).collect();
            Error::param(
                "id",
                format!("unknown figure `{s}`; expected one of {}", known.join(", ")),
            )
        })
    }
}

/// Parameters of the deletion-capacity figure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeletionParams {
    pub universe_size: u64,
    pub threshold_b: f64,
    pub eps: f64,
    pub slope: f64,
}

impl Default for DeletionParams {
    fn default() -> Self {
        DeletionParams {
            universe_size: 10_000,
            threshold_b: 0.8,
            eps: 1.0,
            slope: 1.0,
        }
    }
}

/// Which figure to build, with optional overrides of its defaults.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FigureSpec {
    pub id: Option<FigureId>,
    /// Replaces the default x grid.
    pub grid: Option<Vec<f64>>,
    /// Replaces the default ε list of the per-ε figures.
    pub eps_list: Option<Vec<f64>>,
    pub counterexample: Option<CounterexampleConfig>,
    pub deletion: Option<DeletionParams>,
}

impl FigureSpec {
    pub fn new(id: FigureId) -> Self {
        FigureSpec {
            id: Some(id),
            ..Default::default()
        }
    }

    pub fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn with_eps_list(mut self, eps: Vec<f64>) -> Self {
        self.eps_list = Some(eps);
        self
    }
}

/// ε list used by the per-ε figures unless overridden.
pub const DEFAULT_EPS_LIST: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

/// `n` evenly spaced points from `a` to `b`, both ends exact.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
            v[n - 1] = b;
            v
        }
    }
}

/// `n` log-spaced points from `a` to `b` (both positive), both ends exact.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect();
    if let Some(first) = v.first_mut() {
        *first = a;
    }
    if let Some(last) = v.last_mut() {
        *last = b;
    }
    v
}

/// Default x grid for a figure.
pub fn default_grid(id: FigureId, deletion: &DeletionParams) -> Vec<f64> {
    match id {
        FigureId::MiBounds => (0..=500).map(|i| i as f64 / 100.0).collect(),
        FigureId::MiBoundProb | FigureId::SabComparison | FigureId::MiAdv => logspace(1e-3, 1.0 - 1e-3, 500),
        FigureId::PrivAmpComp => (1..=99).map(|i| i as f64 / 100.0).collect(),
        FigureId::ThresholdPosAcc | FigureId::ThresholdAcc => linspace(-40.0, 10.0, 1000),
        FigureId::DelCapacity => linspace(1.0, deletion.universe_size as f64 - 1.0, 500),
    }
}

fn eps_label(e: f64) -> String {
    format!("eps_{e}")
}

fn per_eps<F>(prefix: &str, y_name: &str, grid: &[f64], eps: &[Epsilon], mut f: F) -> Result<Vec<CurveSeries>>
where
    F: FnMut(Epsilon, f64) -> Result<f64>,
{
    eps.iter()
        .map(|&e| {
            CurveSeries::from_fn(format!("{prefix}_{}", eps_label(e.value())), "p", y_name, grid, |x| {
                f(e, x)
            })
        })
        .collect()
}

fn prob(name: &'static str, x: f64) -> Result<Probability> {
    Probability::named(name, x)
}

/// Builds every series of the figure.
///
/// | figure | x | series |
/// |---|---|---|
/// | `mi_bounds` | ε | `ours`, `erlingsson`, `sablayrolles`, `sablayrolles_raw`, `yeom`, `yeom_raw` |
/// | `mi_bound_prob` | p | `upper_eps_E`, `lower_eps_E` per ε |
/// | `priv_amp_comp` | t | `batch` = e^{-t}, `dataset` = (1-t)/t |
/// | `threshold_pos_acc` | α offset | `positive_accuracy` |
/// | `threshold_acc` | α offset | `accuracy` |
/// | `sab_comparison` | p | `ours_eps_E`, `sablayrolles_eps_E` per ε |
/// | `mi_adv` | p | `advantage_eps_E` per ε |
/// | `del_capacity` | c | `capacity`, `linear` |
pub fn build_figure(spec: &FigureSpec) -> Result<Vec<CurveSeries>> {
    let id = spec.id.ok_or_else(|| Error::param("id", "figure id is required"))?;
    let deletion = spec.deletion.unwrap_or_default();
    let grid = match &spec.grid {
        Some(g) if g.is_empty() => return Err(Error::param("grid", "grid must be nonempty")),
        Some(g) => g.clone(),
        None => default_grid(id, &deletion),
    };
    let eps_list: Vec<Epsilon> = match &spec.eps_list {
        Some(l) if l.is_empty() => return Err(Error::param("eps", "ε list must be nonempty")),
        Some(l) => l.iter().map(|&e| Epsilon::new(e)).collect::<Result<_>>()?,
        None => DEFAULT_EPS_LIST
            .iter()
            .map(|&e| Epsilon::new(e))
            .collect::<Result<_>>()?,
    };
    let cfg = spec.counterexample.unwrap_or_default();

    match id {
        FigureId::MiBounds => {
            let e = |x: f64| Epsilon::named("grid", x);
            let half = Probability::HALF;
            Ok(vec![
                CurveSeries::from_fn("ours", "eps", "accuracy", &grid, |x| {
                    Ok(positive_accuracy_bounds(e(x)?, half).upper.value())
                })?,
                CurveSeries::from_fn("erlingsson", "eps", "accuracy", &grid, |x| {
                    Ok(baseline_erlingsson(e(x)?).value())
                })?,
                CurveSeries::from_fn("sablayrolles", "eps", "accuracy", &grid, |x| {
                    Ok(baseline_sablayrolles(e(x)?, half).value())
                })?,
                CurveSeries::from_fn("sablayrolles_raw", "eps", "accuracy", &grid, |x| {
                    Ok(sablayrolles_raw(e(x)?, half))
                })?,
                CurveSeries::from_fn("yeom", "eps", "accuracy", &grid, |x| Ok(baseline_yeom(e(x)?).value()))?,
                CurveSeries::from_fn("yeom_raw", "eps", "accuracy", &grid, |x| Ok(yeom_raw(e(x)?)))?,
            ])
        }
        FigureId::MiBoundProb => {
            let mut out = per_eps("upper", "accuracy", &grid, &eps_list, |e, x| {
                Ok(positive_accuracy_bounds(e, prob("grid", x)?).upper.value())
            })?;
            out.extend(per_eps("lower", "accuracy", &grid, &eps_list, |e, x| {
                Ok(positive_accuracy_bounds(e, prob("grid", x)?).lower.value())
            })?);
            Ok(out)
        }
        FigureId::SabComparison => {
            let mut out = per_eps("ours", "accuracy", &grid, &eps_list, |e, x| {
                Ok(positive_accuracy_bounds(e, prob("grid", x)?).upper.value())
            })?;
            out.extend(per_eps("sablayrolles", "accuracy", &grid, &eps_list, |e, x| {
                Ok(baseline_sablayrolles(e, prob("grid", x)?).value())
            })?);
            Ok(out)
        }
        FigureId::MiAdv => per_eps("advantage", "advantage", &grid, &eps_list, |e, x| {
            mi_advantage_upper(e, prob("grid", x)?)
        }),
        FigureId::PrivAmpComp => Ok(vec![
            CurveSeries::from_fn("batch", "t", "factor", &grid, |t| Ok(amplification_factors(t)?.batch))?,
            CurveSeries::from_fn("dataset", "t", "factor", &grid, |t| {
                Ok(amplification_factors(t)?.dataset)
            })?,
        ]),
        FigureId::ThresholdPosAcc => Ok(vec![CurveSeries::from_fn(
            "positive_accuracy",
            "alpha_offset",
            "accuracy",
            &grid,
            |a| Ok(positive_accuracy(ThresholdAttack::new(a)?, &cfg).value()),
        )?]),
        FigureId::ThresholdAcc => Ok(vec![CurveSeries::from_fn(
            "accuracy",
            "alpha_offset",
            "accuracy",
            &grid,
            |a| Ok(overall_accuracy(ThresholdAttack::new(a)?, &cfg).value()),
        )?]),
        FigureId::DelCapacity => {
            let (cap, lin) = capacity_curve(
                Epsilon::named("eps", deletion.eps)?,
                deletion.universe_size,
                Probability::named("b", deletion.threshold_b)?,
                &grid,
                deletion.slope,
            )?;
            Ok(vec![cap, lin])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.as_str().parse::<FigureId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{}\"", id.as_str()));
        }
        assert!("mi_bound".parse::<FigureId>().is_err());
    }

    #[test]
    fn default_grids() {
        let d = DeletionParams::default();
        let g = default_grid(FigureId::MiBounds, &d);
        assert_eq!((g.len(), g[0], g[100], g[500]), (501, 0.0, 1.0, 5.0));
        let g = default_grid(FigureId::MiBoundProb, &d);
        assert_eq!((g.len(), g[0], g[499]), (500, 1e-3, 0.999));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let g = default_grid(FigureId::ThresholdAcc, &d);
        assert_eq!((g.len(), g[0], g[999]), (1000, -40.0, 10.0));
        let g = default_grid(FigureId::DelCapacity, &d);
        assert_eq!((g.len(), g[0], g[499]), (500, 1.0, 9999.0));
        let g = default_grid(FigureId::PrivAmpComp, &d);
        assert_eq!((g.len(), g[0], g[98]), (99, 0.01, 0.99));
    }

    #[test]
    fn every_figure_builds() {
        for id in FigureId::ALL {
            let s = build_figure(&FigureSpec::new(id)).unwrap();
            assert!(!s.is_empty(), "{id}");
            assert!(s.iter().all(|c| !c.is_empty()));
        }
    }

    #[test]
    fn mi_bounds_at_one() {
        let s = build_figure(&FigureSpec::new(FigureId::MiBounds).with_grid(vec![1.0])).unwrap();
        let y = |l: &str| s.iter().find(|c| c.label() == l).unwrap().points()[0].1;
        assert!((y("ours") - 0.7311).abs() < 1e-4);
        assert!((y("erlingsson") - 0.8161).abs() < 1e-4);
        assert!((y("sablayrolles") - 0.75).abs() < 1e-12);
        assert!(y("ours") < y("erlingsson") && y("ours") < y("sablayrolles"));
    }

    #[test]
    fn amplification_curves_cross_once() {
        let s = build_figure(&FigureSpec::new(FigureId::PrivAmpComp)).unwrap();
        let sign: Vec<bool> = s[0].ys().zip(s[1].ys()).map(|(b, d)| d > b).collect();
        let flips = sign.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(flips, 1);
        let at = sign.iter().position(|s| !s).unwrap();
        assert!((s[0].points()[at].0 - 0.66).abs() < 0.011);
    }

    #[test]
    fn threshold_positive_accuracy_is_monotone() {
        let s = build_figure(&FigureSpec::new(FigureId::ThresholdPosAcc)).unwrap();
        let ys: Vec<f64> = s[0].ys().collect();
        assert!(ys.windows(2).all(|w| w[1] <= w[0]));
        assert!(ys[0] > 0.9);
    }

    #[test]
    fn override_validation() {
        assert!(build_figure(&FigureSpec::new(FigureId::MiBounds).with_grid(vec![])).is_err());
        assert!(build_figure(&FigureSpec::new(FigureId::MiAdv).with_eps_list(vec![])).is_err());
        assert!(build_figure(&FigureSpec::new(FigureId::MiBounds).with_grid(vec![-1.0])).is_err());
        assert!(build_figure(&FigureSpec::default()).is_err());
    }
}
