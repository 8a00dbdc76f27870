//! Diffusive rescaling `(t, x) -> (t / n, (x - a(t)) / b)` and the pipeline
//! that compares rescaled dynamics against the reflected Brownian sampler.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::driving::{DriverKind, DrivingError, SeedSpec};
use crate::dynamics::{sample_dynamics, DynamicsError};
use crate::pattern::{slot_count, slots, ContinuousPattern, DiscretePattern, PatternError};
use crate::stats::{empirical_ks, StatsError};
use crate::trajectory::{DiscreteTrajectory, Trajectory};
use crate::warren::{warren_replicas, WarrenError};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum RescaleError {
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Driving(#[from] DrivingError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Warren(#[from] WarrenError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// Centering `a(t)` in unscaled time.
#[derive(Clone)]
pub enum Centering {
    Linear { slope: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Centering {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Centering::Linear { slope } => slope * t,
            Centering::Custom(f) => f(t),
        }
    }
}

impl fmt::Debug for Centering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Centering::Linear { slope } => write!(f, "Linear {{ slope: {slope} }}"),
            Centering::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalingPreset {
    time_factor: f64,
    centering: Centering,
    normalization: f64,
}

impl ScalingPreset {
    pub fn new(time_factor: f64, centering: Centering, normalization: f64) -> Result<Self, RescaleError> {
        if !(time_factor > 0.0 && time_factor.is_finite()) {
            return Err(RescaleError::Domain(format!(
                "time factor must be positive, got {time_factor}"
            )));
        }
        if !(normalization > 0.0 && normalization.is_finite()) {
            return Err(RescaleError::Domain(format!(
                "normalization must be positive, got {normalization}"
            )));
        }
        Ok(Self {
            time_factor,
            centering,
            normalization,
        })
    }

    pub fn identity() -> Self {
        Self {
            time_factor: 1.0,
            centering: Centering::Linear { slope: 0.0 },
            normalization: 1.0,
        }
    }

    pub fn time_factor(&self) -> f64 {
        self.time_factor
    }

    pub fn centering(&self) -> &Centering {
        &self.centering
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// `(x - a(t)) / b` at unscaled time `t`.
    #[inline]
    pub fn rescale_value(&self, t: f64, x: f64) -> f64 {
        (x - self.centering.at(t)) / self.normalization
    }

    /// Inverse of [`ScalingPreset::rescale_value`].
    #[inline]
    pub fn unscale_value(&self, t: f64, y: f64) -> f64 {
        y * self.normalization + self.centering.at(t)
    }

    /// Rescaled time and pattern for the state in force at unscaled time `t`.
    pub fn rescale_state(&self, t: f64, state: &DiscretePattern) -> (f64, ContinuousPattern) {
        (t / self.time_factor, state.map(|x| self.rescale_value(t, x as f64)))
    }
}

/// Maps every record `(t, x)` to `(t / n, (x - a(t)) / b)`.
pub fn rescale_trajectory(traj: &DiscreteTrajectory, preset: &ScalingPreset) -> Trajectory<f64> {
    let (times, states) = traj.iter().map(|(t, p)| preset.rescale_state(t, p)).unzip();
    Trajectory::from_parts(times, states)
}

/// Invariance-principle scaling for the built-in drivers at speed-up `n`:
/// Poisson(rate) centers on `rate * t` with `b = sqrt(rate * n)`,
/// Bernoulli(p) on `p * t` with `b = sqrt(p (1 - p) n)`, and the lazy walk
/// needs no centering with `b = sqrt(2 q n)`.
pub fn preset_scaling(kind: DriverKind, n: f64) -> Result<ScalingPreset, RescaleError> {
    if !(n >= 1.0 && n.is_finite()) {
        return Err(RescaleError::Domain(format!("speed-up n must be at least 1, got {n}")));
    }
    let (slope, variance_rate) = match kind {
        DriverKind::Poisson { rate } => (rate, rate),
        DriverKind::Bernoulli { p } => (p, p * (1.0 - p)),
        DriverKind::Lazy { q } => (0.0, 2.0 * q),
    };
    if variance_rate.is_nan() || variance_rate <= 0.0 {
        return Err(RescaleError::Domain(format!(
            "{} driver with parameter {} has no fluctuations to rescale",
            kind.name(),
            kind.parameter()
        )));
    }
    ScalingPreset::new(n, Centering::Linear { slope }, (variance_rate * n).sqrt())
}

#[derive(Debug, Clone)]
pub struct ConvergenceConfig {
    pub driver: DriverKind,
    pub n_values: Vec<f64>,
    pub size: usize,
    /// Evaluation times in rescaled units.
    pub times: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub grid_step: f64,
    /// Defaults to the packed pattern.
    pub initial: Option<DiscretePattern>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceEntry {
    pub n: f64,
    pub level: usize,
    pub index: usize,
    pub time: f64,
    pub ks: f64,
    pub dynamics_samples: usize,
    pub warren_samples: usize,
    /// Replica `r` of this `n` used stream `dynamics_stream_base + r`.
    pub dynamics_stream_base: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centering_slope: Option<f64>,
    pub normalization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub schema_version: u32,
    pub driver: String,
    pub driver_parameter: f64,
    pub size: usize,
    pub times: Vec<f64>,
    pub n_values: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub grid_step: f64,
    pub initial: String,
    pub warren_stream_base: u64,
    pub entries: Vec<ConvergenceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_config: Option<serde_json::Value>,
}

impl ConvergenceReport {
    pub fn ks(&self, n: f64, level: usize, index: usize, time: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.n == n && e.level == level && e.index == index && e.time == time)
            .map(|e| e.ks)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Stream base for the dynamics replicas of the `k`-th speed-up value; the
/// reference sampler uses base 0.
pub fn dynamics_stream_base(k: usize) -> u64 {
    ((k as u64) + 1) << 32
}

/// For each `n`: runs `replicas` copies of the driven dynamics up to
/// `n * max(times)`, rescales them, and measures the per-slot KS distance of
/// each fixed-time marginal to the reflected Brownian sampler started at 0.
pub fn convergence_pipeline(cfg: &ConvergenceConfig) -> Result<ConvergenceReport, RescaleError> {
    if cfg.replicas == 0 {
        return Err(RescaleError::Domain("need at least one replica".into()));
    }
    if cfg.times.is_empty() || cfg.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(RescaleError::Domain("evaluation times must be nonnegative".into()));
    }
    let mut times = cfg.times.clone();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let initial = match &cfg.initial {
        Some(p) => {
            if p.size() != cfg.size {
                return Err(RescaleError::Domain(format!(
                    "initial pattern has {} levels, expected {}",
                    p.size(),
                    cfg.size
                )));
            }
            p.validate()?;
            p.clone()
        }
        None => DiscretePattern::packed(cfg.size)?,
    };

    let reference = warren_replicas(
        cfg.size,
        None,
        &times,
        cfg.grid_step,
        cfg.replicas,
        SeedSpec::new(cfg.seed, 0),
    )?;
    // marginal[time][slot] over replicas
    let marginals = |samples: &[Vec<ContinuousPattern>]| -> Vec<Vec<Vec<f64>>> {
        (0..times.len())
            .map(|k| {
                (0..slot_count(cfg.size))
                    .map(|off| samples.iter().map(|rep| rep[k].as_flat()[off]).collect())
                    .collect()
            })
            .collect()
    };
    let reference = marginals(&reference);

    let mut entries = Vec::new();
    for (k, &n) in cfg.n_values.iter().enumerate() {
        let preset = preset_scaling(cfg.driver, n)?;
        let raw_times: Vec<f64> = times.iter().map(|t| t * n).collect();
        let horizon = raw_times.last().copied().unwrap_or(0.0);
        let base = dynamics_stream_base(k);
        let samples = (0..cfg.replicas)
            .into_par_iter()
            .map(|r| {
                let driving = cfg
                    .driver
                    .generate(cfg.size, horizon, SeedSpec::new(cfg.seed, base + r as u64))?;
                let states = sample_dynamics(&initial, &driving, &raw_times)?;
                Ok(raw_times
                    .iter()
                    .zip(&states)
                    .map(|(&t, p)| preset.rescale_state(t, p).1)
                    .collect())
            })
            .collect::<Result<Vec<Vec<ContinuousPattern>>, RescaleError>>()?;
        let samples = marginals(&samples);
        for (ti, &time) in times.iter().enumerate() {
            for s in slots(cfg.size) {
                let off = s.offset();
                entries.push(ConvergenceEntry {
                    n,
                    level: s.level,
                    index: s.index,
                    time,
                    ks: empirical_ks(&samples[ti][off], &reference[ti][off])?,
                    dynamics_samples: samples[ti][off].len(),
                    warren_samples: reference[ti][off].len(),
                    dynamics_stream_base: base,
                    centering_slope: match preset.centering() {
                        Centering::Linear { slope } => Some(*slope),
                        Centering::Custom(_) => None,
                    },
                    normalization: preset.normalization(),
                });
            }
        }
    }

    Ok(ConvergenceReport {
        schema_version: REPORT_SCHEMA_VERSION,
        driver: cfg.driver.name().into(),
        driver_parameter: cfg.driver.parameter(),
        size: cfg.size,
        times,
        n_values: cfg.n_values.clone(),
        replicas: cfg.replicas,
        seed: cfg.seed,
        grid_step: cfg.grid_step,
        initial: initial.to_string(),
        warren_stream_base: 0,
        entries,
        run_config: None,
    })
}
