//! Exact membership posteriors on small universes.
//!
//! A universe of `N <= 20` points with independent inclusion priors induces a
//! distribution over the `2^N` datasets. Given a mechanism as an explicit
//! outcome table, every posterior `P(x_i ∈ D | S = k)` can be computed by
//! enumeration, which makes this module a ground truth for the closed-form
//! bounds. All sums are done in log space.

mod config;
mod enumerate;
mod mechanism;
mod simulate;
mod universe;

pub use config::{MechanismSpec, OracleConfig};
pub use enumerate::{
    exact_posterior, lemma1_check, verify_bounds, BoundVerification, ExactOracle, Lemma1Report, PosteriorReport,
    BOUND_TOL, PAIRING_TOL,
};
pub use mechanism::{
    mechanism_epsilon, randomized_response_mechanism, FiniteMechanism, MAX_TABLE_ENTRIES, NORMALIZATION_TOL,
};
pub use simulate::{simulate_mi_game, PointSimulation, SimulationReport};
pub use universe::{dataset_log_prior, DatasetMask, Universe, MAX_POINTS};
