//! Membership-inference accuracy bounds for ε-differentially-private training.
//!
//! The core result: if training is ε-DP and a point was included with prior
//! probability `p`, any attacker's posterior belief that the point was used
//! lies in `[sigmoid(logit(p) - ε), sigmoid(logit(p) + ε)]`. Around that sit a
//! dataset sub-sampling planner, B-MI unlearning capacity, an exact
//! enumeration oracle for small universes, a Gaussian threshold-attack
//! example, and figure/table export.
//!
//! ```
//! use mibound::{positive_accuracy_bounds, Epsilon, Probability};
//!
//! let b = positive_accuracy_bounds(Epsilon::new(1.0)?, Probability::HALF);
//! assert!((b.upper.value() - 0.7311).abs() < 1e-4);
//! # Ok::<(), mibound::Error>(())
//! ```

pub mod bounds;
pub mod error;
pub mod figures;
pub mod gaussian;
pub mod logspace;
pub mod oracle;
pub mod planner;
pub mod prob;
pub mod series;
pub mod unlearning;

pub use bounds::{
    advantage_maximizing_prior, amplification_crossing, amplification_factors, amplified_term, attack_accuracy_bound,
    baseline_erlingsson, baseline_sablayrolles, baseline_yeom, compare_baselines, generalization_gap_interval,
    mi_advantage_upper, negative_accuracy_bounds, positive_accuracy_bounds, sablayrolles_raw, yeom_raw,
    AmplificationFactors, AmplificationParams, BaselineComparison, BoundInterval, GapInterval, GeneralizationParams,
};
pub use error::{Error, Result};
pub use prob::{Epsilon, Probability};
pub use series::CurveSeries;
