//! JSON run configuration.
//!
//! Keys mirror the command-line flags one to one (`--levels` is `N`,
//! `--grid-step` is `grid_step`, and so on). Unknown keys are rejected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::driving::DriverKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Simulate,
    Warren,
    Converge,
    Compare,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("at `{path}`: {msg}")]
    Parse { path: String, msg: String },
    #[error("`{key}`: {msg}")]
    Invalid { key: &'static str, msg: String },
}

fn invalid(key: &'static str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key, msg: msg.into() }
}

fn default_driver() -> String {
    "poisson".into()
}
fn default_rate() -> f64 {
    1.0
}
fn default_half() -> f64 {
    0.5
}
fn default_grid_step() -> f64 {
    crate::warren::DEFAULT_GRID_STEP
}
fn default_replicas() -> usize {
    1000
}
fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default = "default_driver")]
    pub driver: String,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default = "default_rate")]
    pub rate: f64,
    #[serde(default = "default_half")]
    pub p: f64,
    #[serde(default = "default_half")]
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<f64>>,
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    /// Pattern text, one level per line (`;` also separates levels).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub driver_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_b: Option<String>,
}

impl RunConfig {
    pub fn driver_kind(&self) -> Result<DriverKind, ConfigError> {
        DriverKind::from_name(&self.driver, self.rate, self.p, self.q).map_err(|e| invalid("driver", e.to_string()))
    }

    pub fn require_levels(&self) -> Result<usize, ConfigError> {
        self.levels.ok_or_else(|| invalid("N", "required for this command"))
    }

    pub fn require_horizon(&self) -> Result<f64, ConfigError> {
        self.horizon
            .ok_or_else(|| invalid("horizon", "required for this command"))
    }

    /// Evaluation times for `converge`: `times`, else `[horizon]`, else `[1]`.
    pub fn evaluation_times(&self) -> Vec<f64> {
        self.times
            .clone()
            .or_else(|| self.horizon.map(|h| vec![h]))
            .unwrap_or_else(|| vec![1.0])
    }

    /// `initial` with `;` level separators turned into newlines.
    pub fn initial_text(&self) -> Option<String> {
        self.initial.as_ref().map(|s| s.replace(';', "\n"))
    }

    /// Compact JSON, embedded in every output.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.levels == Some(0) {
            return Err(invalid("N", "must be at least 1"));
        }
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(invalid("rate", format!("must be positive, got {}", self.rate)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(invalid("p", format!("must lie in [0, 1], got {}", self.p)));
        }
        if !(0.0..=0.5).contains(&self.q) {
            return Err(invalid("q", format!("must lie in [0, 1/2], got {}", self.q)));
        }
        if !(self.grid_step > 0.0 && self.grid_step.is_finite()) {
            return Err(invalid(
                "grid_step",
                format!("must be positive, got {}", self.grid_step),
            ));
        }
        if self.replicas == 0 {
            return Err(invalid("replicas", "must be at least 1"));
        }
        if self.stride == 0 {
            return Err(invalid("stride", "must be at least 1"));
        }
        if let Some(h) = self.horizon {
            if !(h >= 0.0 && h.is_finite()) {
                return Err(invalid("horizon", format!("must be nonnegative, got {h}")));
            }
        }
        if let Some(ts) = &self.times {
            if ts.is_empty() || ts.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
                return Err(invalid("times", "must be a nonempty list of nonnegative times"));
            }
        }
        if let Some(ns) = &self.n_values {
            if ns.is_empty() || ns.iter().any(|n| !(*n >= 1.0 && n.is_finite())) {
                return Err(invalid("n_values", "must be a nonempty list of values >= 1"));
            }
        }
        let kind = self.driver_kind()?;

        match self.command {
            CommandKind::Simulate => {
                if self.driver_file.is_none() {
                    self.require_levels()?;
                    let h = self.require_horizon()?;
                    if kind.is_discrete_time() && h.fract() != 0.0 {
                        return Err(invalid(
                            "horizon",
                            format!("must be a whole number of steps for the {} driver", kind.name()),
                        ));
                    }
                } else if self.samples_out.is_some() {
                    return Err(invalid("samples_out", "cannot replicate a fixed driver file"));
                }
            }
            CommandKind::Warren => {
                self.require_levels()?;
                self.require_horizon()?;
            }
            CommandKind::Converge => {
                self.require_levels()?;
                if self.n_values.is_none() {
                    return Err(invalid("n_values", "required for converge"));
                }
            }
            CommandKind::Compare => {
                if self.sample_a.is_none() {
                    return Err(invalid("sample_a", "required for compare"));
                }
                if self.sample_b.is_none() {
                    return Err(invalid("sample_b", "required for compare"));
                }
            }
        }
        Ok(())
    }
}

/// Parses a JSON value into a config (defaults filled) and validates it.
pub fn config_from_value(value: serde_json::Value) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| ConfigError::Parse {
        path: e.path().to_string(),
        msg: e.inner().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses and validates a JSON config document.
pub fn load_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value: serde_json::Value = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
        path: e.path().to_string(),
        msg: e.inner().to_string(),
    })?;
    config_from_value(value)
}
