use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fluctuations::FluctuationSpec;
use crate::market::{LearningParams, MarketRules, Settlement};

pub const DEFAULT_P_PERCENT: [f64; 5] = [0.24, 0.30, 0.40, 0.50, 0.60];

fn default_p_percent() -> Vec<f64> {
    DEFAULT_P_PERCENT.to_vec()
}

fn default_stride() -> usize {
    4
}

/// Everything that determines an experiment. Only `seed` is required in the
/// JSON form; every other field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Scenario file; a path given on the command line takes precedence.
    #[serde(default)]
    pub scenario: Option<PathBuf>,
    #[serde(default = "default_p_percent")]
    pub p_percent: Vec<f64>,
    #[serde(default)]
    pub fluctuations: FluctuationSpec,
    #[serde(default)]
    pub learning: LearningParams,
    pub seed: u64,
    /// Worker cap; `None` uses every core.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Every `time_stride`-th instant gets its own market; 1 runs all of them.
    #[serde(default = "default_stride")]
    pub time_stride: usize,
    /// Screen balancing acceptances against branch limits.
    #[serde(default)]
    pub network_check: bool,
    #[serde(default)]
    pub settlement: Settlement,
    #[serde(default)]
    pub legacy_update: bool,
    /// Draw evaluation members independently per instant instead of pairing
    /// member `j` across the day.
    #[serde(default)]
    pub resample_members: bool,
}

impl ExperimentConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            scenario: None,
            p_percent: default_p_percent(),
            fluctuations: FluctuationSpec::default(),
            learning: LearningParams::default(),
            seed,
            threads: None,
            time_stride: default_stride(),
            network_check: false,
            settlement: Settlement::default(),
            legacy_update: false,
            resample_members: false,
        }
    }

    pub fn from_json(source: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(source).map_err(|e| Error::Parse(format!("experiment config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_percent.is_empty() {
            return Err(Error::validation("experiment", "p_percent list is empty"));
        }
        if let Some(p) = self.p_percent.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::validation("experiment", format!("p_percent {p} outside (0, 1]")));
        }
        if self.time_stride == 0 {
            return Err(Error::validation("experiment", "time_stride must be >= 1"));
        }
        self.fluctuations.validate()?;
        self.learning.validate()
    }

    pub fn rules(&self) -> MarketRules {
        MarketRules {
            settlement: self.settlement,
            legacy_update: self.legacy_update,
        }
    }

    /// SHA-256 of the canonical JSON form, hex encoded. The thread hint is
    /// excluded since it never affects results.
    pub fn hash(&self) -> String {
        let canonical = Self {
            threads: None,
            ..self.clone()
        };
        sha256_hex(serde_json::to_string(&canonical).expect("config serializes").as_bytes())
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
