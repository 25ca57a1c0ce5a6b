//! Experiment configuration: one JSON file per run plus flag overrides
//! (flags win). Every field is optional here; each subcommand validates
//! the subset it needs.

use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    // Code parameters.
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub p: Option<f64>,
    pub horizon: Option<usize>,
    /// Load a previously sampled code instead of sampling.
    pub code_file: Option<String>,

    // Randomness and scale.
    pub seed: Option<u64>,
    pub trials: Option<usize>,

    // Channel.
    pub channel: Option<String>,
    pub epsilon: Option<f64>,

    // Certification.
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub d_o: Option<usize>,
    pub d_max: Option<usize>,

    // Plant and quantizer.
    pub lambda: Option<f64>,
    pub w_width: Option<f64>,
    pub v_width: Option<f64>,
    pub x0: Option<f64>,
    pub delta: Option<f64>,
    /// Label widths for performance curves.
    pub label_bits: Option<Vec<usize>>,
    pub cap: Option<f64>,

    // Region sweep.
    pub moment: Option<u32>,
    pub use_tighter: Option<bool>,
    pub eps_grid: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    /// Applies command-line overrides; flags win over the file.
    pub fn override_with(
        mut self,
        seed: Option<u64>,
        trials: Option<usize>,
    ) -> Self {
        if seed.is_some() {
            self.seed = seed;
        }
        if trials.is_some() {
            self.trials = trials;
        }
        self
    }

    /// Canonical one-line JSON of the effective config, echoed into every
    /// output header.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
