//! Run configuration, read from `--config` and overridden by flags and `QMONO_THREADS`.

use std::path::Path;

use qmono::sample::DEFAULT_SEED;
use qmono::RoofConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoofSettings {
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub value_tolerance: f64,
}

impl Default for RoofSettings {
    fn default() -> Self {
        let d = RoofConfig::default();
        Self {
            ensemble_size: d.ensemble_size,
            restarts: d.restarts,
            max_iterations: d.max_iterations,
            step_tolerance: d.step_tolerance,
            value_tolerance: d.value_tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerance: f64,
    /// Overrides the main sample count of scans and verification suites.
    pub samples: Option<usize>,
    pub roof: RoofSettings,
    pub output: Format,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, tolerance: 1e-6, samples: None, roof: RoofSettings::default(), output: Format::Json, threads: None }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {origin}: {e}")))?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Parse {
            origin: origin.clone(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let counts = [
            ("samples", self.samples),
            ("threads", self.threads),
            ("roof.restarts", Some(self.roof.restarts)),
            ("roof.max_iterations", Some(self.roof.max_iterations)),
            ("roof.ensemble_size", self.roof.ensemble_size),
        ];
        for (name, v) in counts {
            if v == Some(0) {
                return Err(CliError::Usage(format!("{name} must be at least 1")));
            }
        }
        for (name, v) in [
            ("tolerance", self.tolerance),
            ("roof.step_tolerance", self.roof.step_tolerance),
            ("roof.value_tolerance", self.roof.value_tolerance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    pub fn roof_config(&self) -> RoofConfig {
        RoofConfig {
            ensemble_size: self.roof.ensemble_size,
            restarts: self.roof.restarts,
            max_iterations: self.roof.max_iterations,
            step_tolerance: self.roof.step_tolerance,
            value_tolerance: self.roof.value_tolerance,
            seed: self.seed,
        }
    }
}
