use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::CliError;
use crate::model::{ModelError, ModelParams};
use crate::numeric::MAX_SLICES;
use crate::observables::DEFAULT_PEAK_THRESHOLD;

/// A run configuration, read from a single JSON document. Unknown keys are
/// rejected so that a misspelt parameter cannot silently fall back to a
/// default.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ModelParams,
    #[serde(default)]
    pub energy_window: EnergyWindow,
    #[serde(default)]
    pub solver: SolverChoice,
    /// Coarse oracle slice count; Richardson checks also use twice this.
    #[serde(default = "default_slices")]
    pub slices: usize,
    /// Artifacts produced by `run`.
    #[serde(default)]
    pub outputs: Vec<Output>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_peak_threshold")]
    pub peak_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyWindow {
    pub e_min: f64,
    pub e_max: f64,
    pub n_points: usize,
}

impl Default for EnergyWindow {
    fn default() -> Self {
        Self { e_min: 0.05, e_max: 3.0, n_points: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    #[default]
    Analytic,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Sweep,
    Wavefunction,
    Singularity,
    Continuity,
    Profile,
}

fn default_slices() -> usize {
    100_000
}

fn default_peak_threshold() -> f64 {
    DEFAULT_PEAK_THRESHOLD
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params.validate().map_err(|e| match e {
            ModelError::InvalidParams { field, reason } => CliError::Config(format!("params.{field}: {reason}")),
            other => CliError::Config(other.to_string()),
        })?;
        let w = &self.energy_window;
        if w.n_points < 2 {
            return Err(field_error("energy_window.n_points", format!("must be at least 2, got {}", w.n_points)));
        }
        if !(w.e_min.is_finite() && w.e_max.is_finite() && w.e_max > w.e_min) {
            return Err(field_error(
                "energy_window",
                format!("need finite e_min < e_max, got [{}, {}]", w.e_min, w.e_max),
            ));
        }
        let v0 = self.params.exterior_potential();
        if w.e_min <= v0 {
            return Err(field_error(
                "energy_window.e_min",
                format!("must exceed the exterior potential {v0}, got {}", w.e_min),
            ));
        }
        if self.slices < 100 || 2 * self.slices > MAX_SLICES {
            return Err(field_error("slices", format!("must lie in [100, {}], got {}", MAX_SLICES / 2, self.slices)));
        }
        if !(self.peak_threshold.is_finite() && self.peak_threshold > 0.0) {
            return Err(field_error("peak_threshold", format!("must be positive, got {}", self.peak_threshold)));
        }
        Ok(())
    }
}

fn field_error(field: &str, reason: String) -> CliError {
    CliError::Config(format!("{field}: {reason}"))
}
