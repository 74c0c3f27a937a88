use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::Probability;

use super::mechanism::{randomized_response_mechanism, FiniteMechanism};
use super::universe::Universe;

/// JSON description of a universe and a mechanism.
///
/// ```json
/// {"probs": [0.5, 0.3], "mechanism": {"type": "randomized_response", "flip_prob": 0.25}}
/// {"probs": [0.5], "mechanism": {"type": "table", "outcomes": 2, "rows": [[0.75, 0.25], [0.25, 0.75]]}}
/// ```
///
/// Table rows are plain probabilities in ascending mask order, where bit `i`
/// of the row index is the membership of point `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub probs: Vec<f64>,
    pub mechanism: MechanismSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MechanismSpec {
    RandomizedResponse { flip_prob: f64 },
    Table { outcomes: usize, rows: Vec<Vec<f64>> },
}

impl OracleConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn build(&self) -> Result<(Universe, FiniteMechanism)> {
        let u = Universe::new(&self.probs)?;
        let m = match &self.mechanism {
            MechanismSpec::RandomizedResponse { flip_prob } => {
                randomized_response_mechanism(&u, Probability::named("flip_prob", *flip_prob)?)?
            }
            MechanismSpec::Table { outcomes, rows } => {
                if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != *outcomes) {
                    return Err(Error::DimensionMismatch(format!(
                        "row {i} has {} entries but `outcomes` is {outcomes}",
                        r.len()
                    )));
                }
                FiniteMechanism::from_prob_rows(u.len(), rows)?
            }
        };
        Ok((u, m))
    }
}
