//! Reflected interlacing Brownian motions on a uniform time grid.
//!
//! Each slot `(i, k)` is driven by its own Brownian path and reflected on
//! the already-built level `k-1`: into `[w[i-1][k-1], w[i][k-1]]`, with the
//! missing side dropped for `i = 1` and `i = k`. On the grid the reflection
//! is the one-step clamp
//!
//! ```text
//! w(t + h) = clamp(w(t) + B(t + h) - B(t), lower(t + h), upper(t + h))
//! ```
//!
//! with the boundaries read at the end of the step, since lower levels are
//! complete before a level is built.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::driving::SeedSpec;
use crate::pattern::{slot_count, slots, ContinuousPattern, LevelIndex, PatternError};

/// Slack allowed on the weak interlacing inequalities of grid cross-sections.
pub const INTERLACING_SLACK: f64 = 1e-12;

/// Default grid step.
pub const DEFAULT_GRID_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WarrenError {
    #[error("{0}")]
    Domain(String),
    #[error("drivers disagree on the grid: {0}")]
    Grid(String),
    #[error("initial pattern: {0}")]
    Pattern(#[from] PatternError),
}

/// Values at `0, h, 2h, ..., T`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    step: f64,
    values: Vec<f64>,
}

impl GridPath {
    pub fn new(step: f64, values: Vec<f64>) -> Result<Self, WarrenError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(WarrenError::Domain(format!("grid step must be positive, got {step}")));
        }
        if values.is_empty() {
            return Err(WarrenError::Domain("grid path needs at least one value".into()));
        }
        Ok(Self { step, values })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.step * k as f64
    }

    /// Value at the grid point nearest to `t`.
    pub fn value_near(&self, t: f64) -> f64 {
        let k = ((t / self.step).round().max(0.0) as usize).min(self.values.len() - 1);
        self.values[k]
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }
}

/// Number of steps `T / h`, rejecting horizons that are not a whole
/// number of steps.
pub fn grid_steps(h: f64, horizon: f64) -> Result<usize, WarrenError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(WarrenError::Domain(format!("grid step must be positive, got {h}")));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(WarrenError::Domain(format!("bad horizon {horizon}")));
    }
    let steps = (horizon / h).round();
    if (steps * h - horizon).abs() > 1e-9 * horizon.max(h) {
        return Err(WarrenError::Domain(format!(
            "horizon {horizon} is not a whole number of steps of {h}"
        )));
    }
    Ok(steps as usize)
}

/// Smallest whole number of grid steps reaching `t`.
pub fn covering_horizon(h: f64, t: f64) -> Result<f64, WarrenError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(WarrenError::Domain(format!("grid step must be positive, got {h}")));
    }
    let ratio = t / h;
    let steps = if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
        ratio.round()
    } else {
        ratio.ceil()
    };
    Ok(steps * h)
}

/// `count` independent standard Brownian paths on the grid, started at 0.
pub fn brownian_grid(count: usize, h: f64, horizon: f64, seed: SeedSpec) -> Result<Vec<GridPath>, WarrenError> {
    let steps = grid_steps(h, horizon)?;
    let sd = h.sqrt();
    let mut rng = seed.rng();
    Ok((0..count)
        .map(|_| {
            let mut values = Vec::with_capacity(steps + 1);
            let mut b = 0.0;
            values.push(b);
            for _ in 0..steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                b += sd * z;
                values.push(b);
            }
            GridPath { step: h, values }
        })
        .collect())
}

/// One grid path per slot, in flat slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct WarrenTrajectory {
    size: usize,
    paths: Vec<GridPath>,
}

impl WarrenTrajectory {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn step(&self) -> f64 {
        self.paths[0].step
    }

    /// Number of grid times.
    pub fn len(&self) -> usize {
        self.paths[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn slot(&self, slot: LevelIndex) -> &GridPath {
        &self.paths[slot.offset()]
    }

    pub fn paths(&self) -> &[GridPath] {
        &self.paths
    }

    /// The pattern at grid time `k`.
    pub fn cross_section(&self, k: usize) -> ContinuousPattern {
        ContinuousPattern::from_flat(self.size, self.paths.iter().map(|p| p.values[k]).collect())
            .expect("one path per slot")
    }

    /// The pattern at the grid time nearest to `t`.
    pub fn at_time(&self, t: f64) -> ContinuousPattern {
        let k = ((t / self.step()).round().max(0.0) as usize).min(self.len() - 1);
        self.cross_section(k)
    }

    pub fn last(&self) -> ContinuousPattern {
        self.cross_section(self.len() - 1)
    }

    /// Grid times whose cross-section fails weak interlacing by more than
    /// [`INTERLACING_SLACK`].
    pub fn interlacing_failures(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| {
                !self
                    .cross_section(k)
                    .violations_with_slack(INTERLACING_SLACK)
                    .is_empty()
            })
            .collect()
    }

    /// Fraction of grid times after 0 at which two particles on one level
    /// sit within `tol` of each other.
    pub fn collision_fraction(&self, tol: f64) -> f64 {
        if self.len() < 2 {
            return 0.0;
        }
        let hits = (1..self.len())
            .filter(|&k| {
                (2..=self.size).any(|j| {
                    (2..=j).any(|i| {
                        let a = self.paths[LevelIndex { level: j, index: i - 1 }.offset()].values[k];
                        let b = self.paths[LevelIndex { level: j, index: i }.offset()].values[k];
                        (b - a).abs() <= tol
                    })
                })
            })
            .count();
        hits as f64 / (self.len() - 1) as f64
    }

    /// Grid CSV `time,level,index,value`, every `stride`-th grid time (the
    /// last time is always included).
    pub fn to_csv(&self, stride: usize, comments: &[String]) -> String {
        use std::fmt::Write as _;
        let stride = stride.max(1);
        let mut out = String::from("time,level,index,value\n");
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        let last = self.len() - 1;
        for k in (0..=last).filter(|k| k % stride == 0 || *k == last) {
            let t = self.paths[0].time(k);
            for s in slots(self.size) {
                let _ = writeln!(out, "{t},{},{},{}", s.level, s.index, self.slot(s).values[k]);
            }
        }
        out
    }
}

/// Builds the reflected process from one driver per slot (flat order).
pub fn continuum_sk_map(drivers: &[GridPath], initial: &ContinuousPattern) -> Result<WarrenTrajectory, WarrenError> {
    let size = initial.size();
    if drivers.len() != slot_count(size) {
        return Err(WarrenError::Grid(format!(
            "need {} drivers for {size} levels, got {}",
            slot_count(size),
            drivers.len()
        )));
    }
    let (h, len) = (drivers[0].step, drivers[0].len());
    if let Some(d) = drivers.iter().find(|d| d.step != h || d.len() != len) {
        return Err(WarrenError::Grid(format!(
            "step {} / {} points vs step {h} / {len} points",
            d.step,
            d.len()
        )));
    }
    initial.validate()?;

    let mut paths: Vec<GridPath> = Vec::with_capacity(drivers.len());
    for s in slots(size) {
        let drive = &drivers[s.offset()].values;
        let start = initial.get(s);
        let mut values = Vec::with_capacity(len);
        if s.level == 1 {
            values.extend(drive.iter().map(|b| start + (b - drive[0])));
        } else {
            let lower = (s.index > 1).then(|| {
                &paths[LevelIndex {
                    level: s.level - 1,
                    index: s.index - 1,
                }
                .offset()]
                .values
            });
            let upper = (s.index < s.level).then(|| {
                &paths[LevelIndex {
                    level: s.level - 1,
                    index: s.index,
                }
                .offset()]
                .values
            });
            let mut w = start;
            values.push(w);
            for k in 1..len {
                w += drive[k] - drive[k - 1];
                if let Some(lo) = lower {
                    w = w.max(lo[k]);
                }
                if let Some(hi) = upper {
                    w = w.min(hi[k]);
                }
                values.push(w);
            }
        }
        paths.push(GridPath { step: h, values });
    }
    Ok(WarrenTrajectory { size, paths })
}

/// Samples the reflected interlacing Brownian motions on `[0, T]` with grid
/// step `h`. `initial` defaults to the all-zero pattern.
pub fn warren_sample(
    size: usize,
    initial: Option<&ContinuousPattern>,
    horizon: f64,
    h: f64,
    seed: SeedSpec,
) -> Result<WarrenTrajectory, WarrenError> {
    let zeros;
    let initial = match initial {
        Some(p) => {
            if p.size() != size {
                return Err(WarrenError::Domain(format!(
                    "initial pattern has {} levels, expected {size}",
                    p.size()
                )));
            }
            p
        }
        None => {
            zeros = ContinuousPattern::zeros(size)?;
            &zeros
        }
    };
    let drivers = brownian_grid(slot_count(size), h, horizon, seed)?;
    continuum_sk_map(&drivers, initial)
}

/// Cross-sections at `times` for `replicas` independent runs; replica `r`
/// uses stream `stream_base + r`. Output is indexed `[replica][time]`.
pub fn warren_replicas(
    size: usize,
    initial: Option<&ContinuousPattern>,
    times: &[f64],
    h: f64,
    replicas: usize,
    seed: SeedSpec,
) -> Result<Vec<Vec<ContinuousPattern>>, WarrenError> {
    let horizon = covering_horizon(h, times.iter().copied().fold(0.0, f64::max))?;
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let tr = warren_sample(size, initial, horizon, h, seed.with_stream(seed.stream + r as u64))?;
            Ok(times.iter().map(|&t| tr.at_time(t)).collect())
        })
        .collect()
}
