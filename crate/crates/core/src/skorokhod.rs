//! Skorokhod reflection in a time-dependent interval for piecewise-constant
//! paths, a checker for the reflection conditions, and the level-by-level
//! discrete map that reproduces the block/push dynamics.
//!
//! For `psi`, `l`, `r` constant between finitely many breakpoints the
//! reflected path `phi = psi + eta` is given by the clamp recursion
//!
//! ```text
//! phi(0) = clamp(psi(0), l(0), r(0))
//! phi(t) = clamp(phi(t-) + psi(t) - psi(t-), l(t), r(t))
//! ```
//!
//! over the merged breakpoints. `eta` is the regulator: it may only grow
//! while `phi` is off the upper boundary and only shrink while `phi` is off
//! the lower one.

use thiserror::Error;

use crate::driving::DrivingPath;
use crate::pattern::{slots, DiscretePattern, LevelIndex};
use crate::trajectory::DiscreteTrajectory;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SkorokhodError {
    #[error("empty interval at time {time}: lower {lower} > upper {upper}")]
    EmptyInterval { time: f64, lower: f64, upper: f64 },
    #[error("breakpoint times must be positive and strictly increasing (at {time})")]
    Breakpoints { time: f64 },
    #[error("driving path is not finite at time {time}")]
    NonFinite { time: f64 },
    #[error("paths disagree on the horizon: {0} vs {1}")]
    HorizonMismatch(f64, f64),
    #[error("lower boundary is +inf or upper boundary is -inf at time {time}")]
    BoundaryRange { time: f64 },
    #[error("size mismatch: pattern has {pattern} levels, driver has {driver}")]
    SizeMismatch { pattern: usize, driver: usize },
}

/// Right-continuous step function on `[0, horizon]`. Values may be infinite
/// (boundaries); `horizon` may be `+inf` for paths defined for all time.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePath {
    initial: f64,
    breaks: Vec<(f64, f64)>,
    horizon: f64,
}

impl PiecewisePath {
    pub fn new(initial: f64, breaks: Vec<(f64, f64)>, horizon: f64) -> Result<Self, SkorokhodError> {
        let mut prev = 0.0;
        for &(t, v) in &breaks {
            if t.is_nan() || t <= prev || t > horizon || v.is_nan() {
                return Err(SkorokhodError::Breakpoints { time: t });
            }
            prev = t;
        }
        if initial.is_nan() {
            return Err(SkorokhodError::NonFinite { time: 0.0 });
        }
        Ok(Self {
            initial,
            breaks,
            horizon,
        })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            initial: value,
            breaks: Vec::new(),
            horizon: f64::INFINITY,
        }
    }

    /// Values `values[k]` on `[times[k], times[k+1])`; `times[0]` must be 0.
    pub fn from_samples(times: &[f64], values: &[f64], horizon: f64) -> Result<Self, SkorokhodError> {
        assert_eq!(times.len(), values.len());
        assert!(!times.is_empty() && times[0] == 0.0, "first sample must be at time 0");
        Self::new(
            values[0],
            times[1..].iter().copied().zip(values[1..].iter().copied()).collect(),
            horizon,
        )
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn breaks(&self) -> &[(f64, f64)] {
        &self.breaks
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.breaks.partition_point(|&(s, _)| s <= t);
        if k == 0 {
            self.initial
        } else {
            self.breaks[k - 1].1
        }
    }

    /// Drops breakpoints that do not change the value.
    pub fn canonical(&self) -> Self {
        let mut breaks: Vec<(f64, f64)> = Vec::with_capacity(self.breaks.len());
        let mut current = self.initial;
        for &(t, v) in &self.breaks {
            if v != current {
                breaks.push((t, v));
                current = v;
            }
        }
        Self {
            initial: self.initial,
            breaks,
            horizon: self.horizon,
        }
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self {
            initial: f(self.initial),
            breaks: self.breaks.iter().map(|&(t, v)| (t, f(v))).collect(),
            horizon: self.horizon,
        }
    }
}

/// `[lower(t), upper(t)]`; lower may be `-inf`, upper may be `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDependentInterval {
    pub lower: PiecewisePath,
    pub upper: PiecewisePath,
}

impl TimeDependentInterval {
    pub fn new(lower: PiecewisePath, upper: PiecewisePath) -> Self {
        Self { lower, upper }
    }

    pub fn unbounded() -> Self {
        Self::new(
            PiecewisePath::constant(f64::NEG_INFINITY),
            PiecewisePath::constant(f64::INFINITY),
        )
    }
}

fn common_horizon(paths: &[&PiecewisePath]) -> Result<f64, SkorokhodError> {
    let mut h = f64::INFINITY;
    for p in paths {
        if p.horizon.is_finite() {
            if h.is_finite() && h != p.horizon {
                return Err(SkorokhodError::HorizonMismatch(h, p.horizon));
            }
            h = p.horizon;
        }
    }
    Ok(h)
}

/// Walks the merged breakpoints of several step paths, yielding the time
/// and the current value of each path.
struct Merged<'a, const K: usize> {
    paths: [&'a PiecewisePath; K],
    cursor: [usize; K],
    values: [f64; K],
    started: bool,
}

impl<'a, const K: usize> Merged<'a, K> {
    fn new(paths: [&'a PiecewisePath; K]) -> Self {
        Self {
            values: paths.map(|p| p.initial),
            paths,
            cursor: [0; K],
            started: false,
        }
    }
}

impl<const K: usize> Iterator for Merged<'_, K> {
    type Item = (f64, [f64; K]);

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            return Some((0.0, self.values));
        }
        let t = (0..K)
            .filter_map(|k| self.paths[k].breaks.get(self.cursor[k]).map(|b| b.0))
            .min_by(f64::total_cmp)?;
        for k in 0..K {
            if let Some(&(s, v)) = self.paths[k].breaks.get(self.cursor[k]) {
                if s == t {
                    self.values[k] = v;
                    self.cursor[k] += 1;
                }
            }
        }
        Some((t, self.values))
    }
}

#[inline]
fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    x.max(lo).min(hi)
}

fn check_bounds(t: f64, l: f64, r: f64) -> Result<(), SkorokhodError> {
    if l == f64::INFINITY || r == f64::NEG_INFINITY {
        return Err(SkorokhodError::BoundaryRange { time: t });
    }
    if l > r {
        return Err(SkorokhodError::EmptyInterval {
            time: t,
            lower: l,
            upper: r,
        });
    }
    Ok(())
}

/// Reflects `psi` into `interval`. The result has a breakpoint only where
/// its value changes.
pub fn gamma_reflect(interval: &TimeDependentInterval, psi: &PiecewisePath) -> Result<PiecewisePath, SkorokhodError> {
    let horizon = common_horizon(&[&interval.lower, &interval.upper, psi])?;
    let mut merged = Merged::new([&interval.lower, &interval.upper, psi]);
    let (_, [l0, r0, psi0]) = merged.next().expect("time 0 is always present");
    if !psi0.is_finite() {
        return Err(SkorokhodError::NonFinite { time: 0.0 });
    }
    check_bounds(0.0, l0, r0)?;
    let initial = clamp(psi0, l0, r0);
    let mut phi = initial;
    let mut psi_prev = psi0;
    let mut breaks = Vec::new();
    for (t, [l, r, p]) in merged {
        if !p.is_finite() {
            return Err(SkorokhodError::NonFinite { time: t });
        }
        check_bounds(t, l, r)?;
        let next = clamp(phi + (p - psi_prev), l, r);
        if next != phi {
            breaks.push((t, next));
        }
        phi = next;
        psi_prev = p;
    }
    Ok(PiecewisePath {
        initial,
        breaks,
        horizon,
    })
}

/// Which reflection condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `phi(t)` outside `[l(t), r(t)]`.
    Containment,
    /// `eta` decreased over a window where `phi < r` throughout.
    IncreaseOffUpper,
    /// `eta` increased over a window where `phi > l` throughout.
    DecreaseOffLower,
    /// Negative jump of `eta` at a time with `phi(t) < r(t)`.
    JumpOffUpper,
    /// Positive jump of `eta` at a time with `phi(t) > l(t)`.
    JumpOffLower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prop6Report {
    Pass,
    Fail {
        condition: Condition,
        /// `(s, t]` for window conditions, `[t, t]` for pointwise ones.
        window: (f64, f64),
    },
}

impl Prop6Report {
    pub fn is_pass(&self) -> bool {
        matches!(self, Prop6Report::Pass)
    }
}

/// Checks that `phi` solves the reflection problem for `psi` in `interval`,
/// with `eta(0-) = 0`. Exact comparisons.
pub fn check_prop6(
    interval: &TimeDependentInterval,
    psi: &PiecewisePath,
    phi: &PiecewisePath,
) -> Result<Prop6Report, SkorokhodError> {
    check_prop6_with_tolerance(interval, psi, phi, 0.0)
}

/// [`check_prop6`] where every inequality may fail by `tol`.
pub fn check_prop6_with_tolerance(
    interval: &TimeDependentInterval,
    psi: &PiecewisePath,
    phi: &PiecewisePath,
    tol: f64,
) -> Result<Prop6Report, SkorokhodError> {
    common_horizon(&[&interval.lower, &interval.upper, psi, phi])?;
    let fail = |condition, s, t| {
        Ok(Prop6Report::Fail {
            condition,
            window: (s, t),
        })
    };
    let mut prev: Option<(f64, f64, f64, f64)> = None; // (t, l, r, phi) and eta below
    let mut eta_prev = 0.0;
    for (t, [l, r, p, f]) in Merged::new([&interval.lower, &interval.upper, psi, phi]) {
        if f < l - tol || f > r + tol {
            return fail(Condition::Containment, t, t);
        }
        let eta = f - p;
        let d = eta - eta_prev;
        let off_upper = f < r - tol;
        let off_lower = f > l + tol;
        if let Some((s, ls, rs, fs)) = prev {
            if fs < rs - tol && off_upper && d < -tol {
                return fail(Condition::IncreaseOffUpper, s, t);
            }
            if fs > ls + tol && off_lower && d > tol {
                return fail(Condition::DecreaseOffLower, s, t);
            }
        }
        if off_upper && d < -tol {
            return fail(Condition::JumpOffUpper, t, t);
        }
        if off_lower && d > tol {
            return fail(Condition::JumpOffLower, t, t);
        }
        prev = Some((t, l, r, f));
        eta_prev = eta;
    }
    Ok(Prop6Report::Pass)
}

fn step_path(initial: i64, steps: &[(f64, i64)], horizon: f64) -> PiecewisePath {
    PiecewisePath {
        initial: initial as f64,
        breaks: steps.iter().map(|&(t, v)| (t, v as f64)).collect(),
        horizon,
    }
}

/// Builds the block/push trajectory level by level from reflections: slot
/// `(i, k)` is its driver (started at `initial`) reflected into
/// `[x[i-1][k-1], x[i][k-1] - 1]`, dropping the side that does not exist
/// for `i = 1` or `i = k`. Sampled at time 0 and at every jump time of the
/// driver.
pub fn discrete_sk_map(driving: &DrivingPath, initial: &DiscretePattern) -> Result<DiscreteTrajectory, SkorokhodError> {
    let size = initial.size();
    if driving.size() != size {
        return Err(SkorokhodError::SizeMismatch {
            pattern: size,
            driver: driving.size(),
        });
    }
    let horizon = driving.horizon();
    let mut paths: Vec<PiecewisePath> = Vec::with_capacity(crate::pattern::slot_count(size));
    for s in slots(size) {
        // driver shifted to start from the pattern's initial value
        let shift = initial.get(s) - driving.initial(s);
        let steps: Vec<(f64, i64)> = driving.slot_steps(s).into_iter().map(|(t, v)| (t, v + shift)).collect();
        let psi = step_path(initial.get(s), &steps, horizon);
        let phi = if s.level == 1 {
            psi
        } else {
            let below = |index: usize| {
                &paths[LevelIndex {
                    level: s.level - 1,
                    index,
                }
                .offset()]
            };
            let lower = if s.index > 1 {
                below(s.index - 1).clone()
            } else {
                PiecewisePath {
                    horizon,
                    ..PiecewisePath::constant(f64::NEG_INFINITY)
                }
            };
            let upper = if s.index < s.level {
                below(s.index).map(|v| v - 1.0)
            } else {
                PiecewisePath {
                    horizon,
                    ..PiecewisePath::constant(f64::INFINITY)
                }
            };
            gamma_reflect(&TimeDependentInterval::new(lower, upper), &psi)?
        };
        paths.push(phi);
    }

    let mut times = vec![0.0];
    times.extend(driving.discontinuities().map(|g| g[0].time));
    let states = times
        .iter()
        .map(|&t| {
            let values = paths.iter().map(|p| p.value_at(t) as i64).collect();
            DiscretePattern::from_flat(size, values).expect("size checked above")
        })
        .collect();
    Ok(DiscreteTrajectory::from_parts(times, states))
}
