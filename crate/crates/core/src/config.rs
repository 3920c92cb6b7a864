//! JSON model configuration.
//!
//! ```json
//! { "type": "perturbation",
//!   "params": { "omega": 0.0, "delta": 1.0, "epsilon": 1.0, "phi": 0.7853981633974483 },
//!   "domain": [-3.0, 3.0] }
//! ```
//!
//! Types: `custom-table` (`lambda`, `omega0`, `delta`, `gamma` arrays),
//! `perturbation` (`omega`, `delta`, `epsilon`, `phi`), `rabi` (`omega0`,
//! `omega`, optional `delta_convention` = `"paper"` | `"matrix"`) and
//! `three-level` (`base`: nested config, `g`, `eps_gap`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{Domain, TwoLevelModel};
use crate::table::TableModel;
use crate::zoo::{DeltaConvention, PerturbationModel, PerturbationParams, RabiModel, RabiParams, ThreeLevelModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "kebab-case")]
pub enum ModelSpec {
    CustomTable(TableParams),
    Perturbation(PerturbationParams),
    Rabi(RabiParams),
    ThreeLevel(ThreeLevelParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableParams {
    pub lambda: Vec<f64>,
    pub omega0: Vec<f64>,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeLevelParams {
    pub base: Box<ModelConfig>,
    pub g: f64,
    pub eps_gap: f64,
}

/// A model description as read from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(flatten)]
    pub spec: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
}

impl ModelConfig {
    /// Parses JSON; errors carry the offending field path and line/column.
    pub fn from_json(text: &str) -> Result<Self> {
        // serde_json appends "at line L column C" to every message
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model config serializes")
    }

    /// The Rabi Δ convention in force, if any part of the model uses one.
    pub fn delta_convention(&self) -> Option<DeltaConvention> {
        match &self.spec {
            ModelSpec::Rabi(p) => Some(p.delta_convention),
            ModelSpec::ThreeLevel(p) => p.base.delta_convention(),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<Box<dyn TwoLevelModel>> {
        Ok(match &self.spec {
            ModelSpec::CustomTable(t) => Box::new(TableModel::new(
                t.lambda.clone(),
                t.omega0.clone(),
                t.delta.clone(),
                t.gamma.clone(),
                self.domain,
            )?),
            ModelSpec::Perturbation(p) => {
                Box::new(PerturbationModel::new(*p, self.domain.unwrap_or(Domain::real_line()))?)
            }
            ModelSpec::Rabi(p) => Box::new(RabiModel::new(
                *p,
                self.domain.unwrap_or(Domain {
                    lo: 0.0,
                    hi: f64::INFINITY,
                }),
            )?),
            ModelSpec::ThreeLevel(p) => {
                let mut base_cfg = (*p.base).clone();
                if let Some(d) = self.domain {
                    base_cfg.domain = Some(d);
                }
                Box::new(ThreeLevelModel::new(base_cfg.build()?, p.g, p.eps_gap)?)
            }
        })
    }
}
