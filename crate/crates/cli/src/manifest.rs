//! Dataset manifests (TOML):
//!
//! ```toml
//! [range]          # optional; every value must lie in [min, max]
//! min = 0.0
//! max = 1.0
//!
//! [[sample]]
//! path = "s000.txt" # relative to the manifest's directory
//! label = "a"       # optional, but all or none
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use ergoclust::{Clustering, Sample64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::sample_io::read_sample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSource {
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<ValueRange>,
    #[serde(default, rename = "sample")]
    pub samples: Vec<SampleSource>,
}

/// A manifest with every sample loaded.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub sources: Vec<SampleSource>,
    pub samples: Vec<Sample64>,
    pub labels: Option<Clustering>,
}

impl DatasetManifest {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    pub fn load(path: &Path) -> Result<LoadedDataset> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let manifest = Self::parse(&text, path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        manifest.resolve(base, path)
    }

    fn resolve(&self, base: &Path, manifest_path: &Path) -> Result<LoadedDataset> {
        let config_err = |reason: String| CliError::Config {
            path: manifest_path.to_path_buf(),
            reason,
        };
        if self.samples.is_empty() {
            return Err(config_err("manifest lists no samples".into()));
        }
        let labelled = self.samples.iter().filter(|s| s.label.is_some()).count();
        if labelled != 0 && labelled != self.samples.len() {
            return Err(config_err(format!(
                "{labelled} of {} samples carry a label; labels must cover all samples",
                self.samples.len()
            )));
        }
        if let Some(r) = self.range {
            if !(r.min.is_finite() && r.max.is_finite() && r.min <= r.max) {
                return Err(config_err(format!("invalid range [{}, {}]", r.min, r.max)));
            }
        }

        let mut samples = Vec::with_capacity(self.samples.len());
        for src in &self.samples {
            let file = base.join(&src.path);
            let sample = read_sample(&file)?;
            if let Some(r) = self.range {
                if let Some(v) = sample.values().iter().find(|v| **v < r.min || **v > r.max) {
                    return Err(config_err(format!(
                        "{} holds {v}, outside the declared range [{}, {}]",
                        file.display(),
                        r.min,
                        r.max
                    )));
                }
            }
            samples.push(sample);
        }
        let labels = (labelled != 0).then(|| {
            let names: Vec<&str> = self
                .samples
                .iter()
                .map(|s| s.label.as_deref().unwrap())
                .collect();
            Clustering::from_labels(&names)
        });
        Ok(LoadedDataset {
            sources: self.samples.clone(),
            samples,
            labels,
        })
    }
}
