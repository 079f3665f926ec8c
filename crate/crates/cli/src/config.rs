//! Experiment configuration (TOML):
//!
//! ```toml
//! seed = 2010
//! lengths = [500, 2000, 8000]   # strictly increasing
//! trials = 100
//! out = "rates.csv"             # optional; stdout otherwise
//!
//! [coupling]
//! mode = "independent"          # or "shifted-copies" with `lag = 3`
//!
//! [[coupling.clusters]]
//! count = 3
//! process = { kind = "markov2", p01 = 0.2, p10 = 0.8, emit0 = 0.0, emit1 = 1.0 }
//!
//! [algorithm]
//! mode = "known-k"              # `k` defaults to the number of clusters
//! # mode = "threshold"; set `delta = 0.3`, or a mixing bound such as
//! # mixing = { form = "exponential", c = 1.0, r = 0.5 } to use the default schedule
//!
//! [estimator]                   # optional
//! kind = "exact"                # or "truncated" with m_max, l_max
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use ergoclust::bounds::Alg2Params;
use ergoclust::{default_schedule, CouplingSpec, Estimator, MixingSchedule};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgorithmConfig {
    KnownK {
        #[serde(default)]
        k: Option<usize>,
    },
    Threshold {
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        mixing: Option<MixingSchedule<f64>>,
    },
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        AlgorithmConfig::KnownK { k: None }
    }
}

/// What to run for one dataset size.
#[derive(Debug, Clone, PartialEq)]
pub enum Procedure {
    KnownK(usize),
    Threshold(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub procedure: Procedure,
    pub estimator: Estimator,
    /// Set when δ came from the default schedule.
    pub schedule: Option<Alg2Params<f64>>,
}

impl AlgorithmConfig {
    /// Resolves thresholds and estimator for `num_samples` samples whose
    /// shortest length is `n_min`.
    pub fn plan(
        &self,
        n_min: usize,
        num_samples: usize,
        default_k: Option<usize>,
        estimator: Option<&Estimator>,
    ) -> Result<Plan> {
        match self {
            AlgorithmConfig::KnownK { k } => {
                let k = k
                    .or(default_k)
                    .ok_or_else(|| CliError::input("known-k mode needs k"))?;
                if k == 0 || k > num_samples {
                    return Err(CliError::input(format!(
                        "k = {k} must lie in 1..={num_samples}"
                    )));
                }
                Ok(Plan {
                    procedure: Procedure::KnownK(k),
                    estimator: estimator.copied().unwrap_or_default(),
                    schedule: None,
                })
            }
            AlgorithmConfig::Threshold { delta, mixing } => {
                let schedule = match (delta, mixing) {
                    (Some(_), _) => None,
                    (None, Some(alpha)) => Some(
                        default_schedule(n_min as u64, num_samples as u64, alpha)
                            .map_err(CliError::input)?,
                    ),
                    (None, None) => {
                        return Err(CliError::input(
                            "threshold mode needs delta or a mixing bound",
                        ))
                    }
                };
                let delta = delta.unwrap_or_else(|| schedule.unwrap().delta_n);
                if !(delta.is_finite() && delta > 0.0) {
                    return Err(CliError::input(format!(
                        "delta = {delta} must be finite and positive"
                    )));
                }
                let estimator = match (estimator, &schedule) {
                    (Some(e), _) => *e,
                    (None, Some(p)) => {
                        Estimator::Truncated(p.truncation().map_err(CliError::input)?)
                    }
                    (None, None) => Estimator::default(),
                };
                Ok(Plan {
                    procedure: Procedure::Threshold(delta),
                    estimator,
                    schedule,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub lengths: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub coupling: CouplingSpec,
    #[serde(default)]
    pub algorithm: AlgorithmConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<Estimator>,
}

fn default_trials() -> usize {
    1
}

impl ExperimentConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(CliError::input("trials must be at least 1"));
        }
        if self.lengths.is_empty() || self.lengths[0] == 0 {
            return Err(CliError::input("lengths must be nonempty and positive"));
        }
        if self.lengths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::input("lengths must be strictly increasing"));
        }
        self.coupling.validate().map_err(CliError::input)?;
        if let Some(e) = &self.estimator {
            validate_estimator(e)?;
        }
        for &n in &self.lengths {
            self.plan(n)?;
        }
        Ok(())
    }

    pub fn plan(&self, n: usize) -> Result<Plan> {
        let num_samples = self.coupling.num_samples();
        self.algorithm.plan(
            n,
            num_samples,
            Some(self.coupling.clusters.len()),
            self.estimator.as_ref(),
        )
    }
}

pub fn validate_estimator(e: &Estimator) -> Result<()> {
    match e {
        Estimator::Exact(c) => c.validate(),
        Estimator::Truncated(s) => s.validate(),
    }
    .map_err(CliError::input)
}

/// Parses `exp:c,r`, `poly:c,s` or `none`.
pub fn parse_mixing(text: &str) -> Result<MixingSchedule<f64>> {
    if text == "none" {
        return Ok(MixingSchedule::independent());
    }
    let bad = || {
        CliError::input(format!(
            "mixing {text:?}: expected exp:c,r | poly:c,s | none"
        ))
    };
    let (form, args) = text.split_once(':').ok_or_else(bad)?;
    let (a, b) = args.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    match form {
        "exp" => MixingSchedule::exponential(a, b),
        "poly" => MixingSchedule::polynomial(a, b),
        _ => return Err(bad()),
    }
    .map_err(CliError::input)
}
