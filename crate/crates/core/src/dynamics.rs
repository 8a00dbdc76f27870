//! Block/push interlacing dynamics driven by a unit-step path.
//!
//! At every discontinuity of the driver the pattern is updated level by
//! level. Level 1 copies its driver increment. For a slot `(i, k)` with
//! `k >= 2`, using level `k-1` after the update and the slot's own value
//! before it, the first matching rule wins:
//!
//! 1. pushed up by `(i-1, k-1)` if `i > 1` and `x = x[i-1][k-1] - 1`;
//! 2. pushed down by `(i, k-1)` if `i < k` and `x = x[i][k-1]`;
//! 3. on a +1 driver jump: blocked by `(i, k-1)` if `i < k` and
//!    `x[i][k-1] = x + 1`, else move up;
//! 4. on a -1 driver jump: blocked by `(i-1, k-1)` if `i > 1` and
//!    `x[i-1][k-1] = x`, else move down;
//! 5. otherwise stay.
//!
//! A push discards the slot's own driver increment at that instant.

use thiserror::Error;

use crate::driving::DrivingPath;
use crate::pattern::{slot_count, DiscretePattern, LevelIndex, PatternError};
use crate::trajectory::DiscreteTrajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Idle,
    MovedUp,
    MovedDown,
    PushedUp { by: LevelIndex },
    PushedDown { by: LevelIndex },
    Blocked { by: LevelIndex },
}

/// What every slot did at one update.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateRecord {
    pub time: f64,
    /// Flat slot order.
    pub outcomes: Vec<Outcome>,
}

impl UpdateRecord {
    pub fn outcome(&self, slot: LevelIndex) -> Outcome {
        self.outcomes[slot.offset()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsState {
    pub pattern: DiscretePattern,
    pub clock: f64,
}

impl DynamicsState {
    pub fn new(pattern: DiscretePattern) -> Self {
        Self { pattern, clock: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("state at time {time} does not interlace: {source}")]
    InvalidState { time: f64, source: PatternError },
    #[error("driver increment {increment} at time {time} in slot {slot}; increments must lie in {{-1, 0, 1}}")]
    Regularity {
        time: f64,
        slot: LevelIndex,
        increment: i64,
    },
    #[error("update at time {time} precedes the state clock {clock}")]
    ClockOrder { clock: f64, time: f64 },
    #[error("size mismatch: pattern has {pattern} levels, driver has {driver}")]
    SizeMismatch { pattern: usize, driver: usize },
    #[error("{0}")]
    Domain(String),
}

/// One slot of rules 1-5. `below` is level `k-1` at time `t`.
#[inline]
fn update_slot(i: usize, k: usize, x: i64, below: &[i64], inc: i8) -> (i64, Outcome) {
    let push_up = i > 1 && x == below[i - 2] - 1;
    let push_down = i < k && x == below[i - 1];
    debug_assert!(!(push_up && push_down), "slot ({i}, {k}) pushed from both sides");
    if push_up {
        return (
            x + 1,
            Outcome::PushedUp {
                by: LevelIndex {
                    level: k - 1,
                    index: i - 1,
                },
            },
        );
    }
    if push_down {
        return (
            x - 1,
            Outcome::PushedDown {
                by: LevelIndex { level: k - 1, index: i },
            },
        );
    }
    match inc {
        1 if i < k && below[i - 1] == x + 1 => (
            x,
            Outcome::Blocked {
                by: LevelIndex { level: k - 1, index: i },
            },
        ),
        1 => (x + 1, Outcome::MovedUp),
        -1 if i > 1 && below[i - 2] == x => (
            x,
            Outcome::Blocked {
                by: LevelIndex {
                    level: k - 1,
                    index: i - 1,
                },
            },
        ),
        -1 => (x - 1, Outcome::MovedDown),
        _ => (x, Outcome::Idle),
    }
}

/// Sequential update of `pattern` in place. `increments` is dense in flat
/// slot order and already checked to lie in {-1, 0, 1}.
fn sweep(pattern: &mut DiscretePattern, increments: &[i8], mut outcomes: Option<&mut [Outcome]>) {
    let size = pattern.size();
    let x11 = pattern.at(1, 1);
    let inc = increments[0];
    pattern.set(LevelIndex { level: 1, index: 1 }, x11 + i64::from(inc));
    if let Some(o) = outcomes.as_deref_mut() {
        o[0] = match inc {
            1 => Outcome::MovedUp,
            -1 => Outcome::MovedDown,
            _ => Outcome::Idle,
        };
    }

    let mut below: Vec<i64> = Vec::with_capacity(size);
    for k in 2..=size {
        below.clear();
        below.extend_from_slice(pattern.level(k - 1));
        let base = k * (k - 1) / 2;
        let level_inc = &increments[base..base + k];

        #[cfg(debug_assertions)]
        let reversed: Vec<i64> = {
            // each slot reads only level k-1 at t and itself at t-, so the
            // sweep direction within a level cannot matter
            let old = pattern.level(k);
            let mut r = vec![0; k];
            for i in (1..=k).rev() {
                r[i - 1] = update_slot(i, k, old[i - 1], &below, level_inc[i - 1]).0;
            }
            r
        };

        let level = pattern.level_mut(k);
        for i in 1..=k {
            let (v, o) = update_slot(i, k, level[i - 1], &below, level_inc[i - 1]);
            level[i - 1] = v;
            if let Some(out) = outcomes.as_deref_mut() {
                out[base + i - 1] = o;
            }
        }

        #[cfg(debug_assertions)]
        debug_assert_eq!(level, &reversed[..], "within-level order changed level {k}");
    }
}

fn check_increments(increments: &[i8], time: f64) -> Result<(), DynamicsError> {
    match increments.iter().position(|d| !(-1..=1).contains(d)) {
        Some(off) => Err(DynamicsError::Regularity {
            time,
            slot: LevelIndex::from_offset(off),
            increment: increments[off].into(),
        }),
        None => Ok(()),
    }
}

/// Applies one discontinuity with dense flat-order `increments` at time `t`.
pub fn apply_event(
    state: &DynamicsState,
    increments: &[i8],
    t: f64,
) -> Result<(DynamicsState, UpdateRecord), DynamicsError> {
    let size = state.pattern.size();
    if increments.len() != slot_count(size) {
        return Err(DynamicsError::Domain(format!(
            "expected {} increments, got {}",
            slot_count(size),
            increments.len()
        )));
    }
    if t < state.clock {
        return Err(DynamicsError::ClockOrder {
            clock: state.clock,
            time: t,
        });
    }
    state.pattern.validate().map_err(|source| DynamicsError::InvalidState {
        time: state.clock,
        source,
    })?;
    check_increments(increments, t)?;

    let mut pattern = state.pattern.clone();
    let mut outcomes = vec![Outcome::Idle; increments.len()];
    sweep(&mut pattern, increments, Some(&mut outcomes));
    debug_assert!(pattern.is_valid(), "update broke interlacing at t = {t}");
    Ok((DynamicsState { pattern, clock: t }, UpdateRecord { time: t, outcomes }))
}

fn check_inputs(initial: &DiscretePattern, driving: &DrivingPath) -> Result<(), DynamicsError> {
    if initial.size() != driving.size() {
        return Err(DynamicsError::SizeMismatch {
            pattern: initial.size(),
            driver: driving.size(),
        });
    }
    initial
        .validate()
        .map_err(|source| DynamicsError::InvalidState { time: 0.0, source })
}

/// Streams the dynamics, calling `visit(time, pattern, record)` after every
/// discontinuity up to `horizon`.
fn drive(
    initial: &DiscretePattern,
    driving: &DrivingPath,
    horizon: f64,
    with_records: bool,
    mut visit: impl FnMut(f64, &DiscretePattern, Option<&[Outcome]>),
) -> Result<(), DynamicsError> {
    check_inputs(initial, driving)?;
    if horizon > driving.horizon() {
        return Err(DynamicsError::Domain(format!(
            "horizon {horizon} exceeds the driver's horizon {}",
            driving.horizon()
        )));
    }
    let mut pattern = initial.clone();
    let mut increments = vec![0i8; slot_count(initial.size())];
    let mut outcomes = vec![Outcome::Idle; increments.len()];
    for group in driving.discontinuities() {
        let t = group[0].time;
        if t > horizon {
            break;
        }
        increments.fill(0);
        for e in group {
            increments[e.slot.offset()] = e.increment;
        }
        sweep(&mut pattern, &increments, with_records.then_some(&mut outcomes[..]));
        debug_assert!(pattern.is_valid(), "update broke interlacing at t = {t}");
        visit(t, &pattern, with_records.then_some(&outcomes[..]));
    }
    Ok(())
}

/// Runs the dynamics from `initial` over the driver's jumps in `[0, horizon]`.
/// Records the initial state and the state after each discontinuity. Only the
/// driver's increments matter, never its initial values.
pub fn run_dynamics(
    initial: &DiscretePattern,
    driving: &DrivingPath,
    horizon: f64,
) -> Result<DiscreteTrajectory, DynamicsError> {
    let mut traj = DiscreteTrajectory::new(initial.clone());
    drive(initial, driving, horizon, false, |t, p, _| traj.push(t, p.clone()))?;
    Ok(traj)
}

/// [`run_dynamics`] plus the per-slot interaction record of every update.
pub fn run_dynamics_recorded(
    initial: &DiscretePattern,
    driving: &DrivingPath,
    horizon: f64,
) -> Result<(DiscreteTrajectory, Vec<UpdateRecord>), DynamicsError> {
    let mut traj = DiscreteTrajectory::new(initial.clone());
    let mut records = Vec::new();
    drive(initial, driving, horizon, true, |t, p, o| {
        traj.push(t, p.clone());
        records.push(UpdateRecord {
            time: t,
            outcomes: o.expect("records requested").to_vec(),
        });
    })?;
    Ok((traj, records))
}

/// States at each of the nondecreasing `times` without storing the path.
pub fn sample_dynamics(
    initial: &DiscretePattern,
    driving: &DrivingPath,
    times: &[f64],
) -> Result<Vec<DiscretePattern>, DynamicsError> {
    if times.windows(2).any(|w| w[0] > w[1]) {
        return Err(DynamicsError::Domain("sample times must be nondecreasing".into()));
    }
    let horizon = times.last().copied().unwrap_or(0.0);
    let mut out = Vec::with_capacity(times.len());
    let mut current = initial.clone();
    let mut next = 0;
    drive(initial, driving, horizon, false, |t, p, _| {
        while next < times.len() && times[next] < t {
            out.push(current.clone());
            next += 1;
        }
        current.clone_from(p);
    })?;
    while out.len() < times.len() {
        out.push(current.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driving::{poisson_driver, DrivingEvent, SeedSpec};

    fn pat(levels: &[&[i64]]) -> DiscretePattern {
        DiscretePattern::from_levels(levels).unwrap()
    }

    fn slot(level: usize, index: usize) -> LevelIndex {
        LevelIndex::new(level, index).unwrap()
    }

    fn single(size: usize, at: LevelIndex, inc: i8) -> Vec<i8> {
        let mut v = vec![0; slot_count(size)];
        v[at.offset()] = inc;
        v
    }

    #[test]
    fn push_from_level_one() {
        let s = DynamicsState::new(pat(&[&[0], &[-1, 0]]));
        let (next, rec) = apply_event(&s, &single(2, slot(1, 1), 1), 0.5).unwrap();
        assert_eq!(next.pattern, pat(&[&[1], &[-1, 1]]));
        assert_eq!(next.clock, 0.5);
        assert_eq!(rec.outcome(slot(1, 1)), Outcome::MovedUp);
        assert_eq!(rec.outcome(slot(2, 2)), Outcome::PushedUp { by: slot(1, 1) });
        assert_eq!(rec.outcome(slot(2, 1)), Outcome::Idle);
    }

    #[test]
    fn blocked_from_below() {
        let s = DynamicsState::new(pat(&[&[0], &[-1, 0]]));
        let (next, rec) = apply_event(&s, &single(2, slot(2, 1), 1), 1.0).unwrap();
        assert_eq!(next.pattern, s.pattern);
        assert_eq!(rec.outcome(slot(2, 1)), Outcome::Blocked { by: slot(1, 1) });
    }

    #[test]
    fn free_move() {
        let s = DynamicsState::new(pat(&[&[0], &[-2, 1]]));
        let (next, rec) = apply_event(&s, &single(2, slot(2, 1), 1), 1.0).unwrap();
        assert_eq!(next.pattern, pat(&[&[0], &[-1, 1]]));
        assert_eq!(rec.outcome(slot(2, 1)), Outcome::MovedUp);
    }

    #[test]
    fn cascade_through_three_levels() {
        let s = DynamicsState::new(DiscretePattern::packed(3).unwrap());
        let (next, rec) = apply_event(&s, &single(3, slot(1, 1), 1), 1.0).unwrap();
        assert_eq!(next.pattern, pat(&[&[1], &[-1, 1], &[-2, -1, 1]]));
        assert_eq!(rec.outcome(slot(3, 3)), Outcome::PushedUp { by: slot(2, 2) });
    }

    #[test]
    fn push_down_and_down_block() {
        // level-1 particle moves down onto x[1][2] + 0: pushes it down
        let s = DynamicsState::new(pat(&[&[0], &[-1, 0]]));
        let (next, rec) = apply_event(&s, &single(2, slot(1, 1), -1), 1.0).unwrap();
        assert_eq!(next.pattern, pat(&[&[-1], &[-2, 0]]));
        assert_eq!(rec.outcome(slot(2, 1)), Outcome::PushedDown { by: slot(1, 1) });

        // -1 on (2,2) resting on x[1][1]: blocked
        let (next, rec) = apply_event(&s, &single(2, slot(2, 2), -1), 1.0).unwrap();
        assert_eq!(next.pattern, s.pattern);
        assert_eq!(rec.outcome(slot(2, 2)), Outcome::Blocked { by: slot(1, 1) });
    }

    #[test]
    fn push_overrides_opposing_driver() {
        // (2,2) wants to move down but is pushed up by level 1 at the same instant
        let s = DynamicsState::new(pat(&[&[0], &[-1, 0]]));
        let mut inc = single(2, slot(1, 1), 1);
        inc[slot(2, 2).offset()] = -1;
        let (next, rec) = apply_event(&s, &inc, 1.0).unwrap();
        assert_eq!(next.pattern, pat(&[&[1], &[-1, 1]]));
        assert_eq!(rec.outcome(slot(2, 2)), Outcome::PushedUp { by: slot(1, 1) });
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = DynamicsState::new(pat(&[&[0], &[0, 0]]));
        assert!(matches!(
            apply_event(&s, &[0, 0, 0], 1.0),
            Err(DynamicsError::InvalidState { .. })
        ));
        let s = DynamicsState::new(DiscretePattern::packed(2).unwrap());
        assert!(matches!(
            apply_event(&s, &[2, 0, 0], 1.0),
            Err(DynamicsError::Regularity { increment: 2, .. })
        ));
        let s = DynamicsState {
            pattern: DiscretePattern::packed(2).unwrap(),
            clock: 3.0,
        };
        assert!(matches!(
            apply_event(&s, &[1, 0, 0], 1.0),
            Err(DynamicsError::ClockOrder { .. })
        ));
    }

    #[test]
    fn empty_driver_gives_constant_trajectory() {
        let init = DiscretePattern::packed(3).unwrap();
        let d = DrivingPath::new(3, vec![0; 6], vec![], 5.0).unwrap();
        let tr = run_dynamics(&init, &d, 5.0).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.state_at(4.0), &init);
    }

    #[test]
    fn single_event_matches_apply_event() {
        let init = DiscretePattern::packed(3).unwrap();
        let d = DrivingPath::new(
            3,
            vec![0; 6],
            vec![DrivingEvent {
                time: 0.7,
                slot: slot(1, 1),
                increment: 1,
            }],
            1.0,
        )
        .unwrap();
        let tr = run_dynamics(&init, &d, 1.0).unwrap();
        let (expected, _) = apply_event(&DynamicsState::new(init.clone()), &single(3, slot(1, 1), 1), 0.7).unwrap();
        assert_eq!(tr.times(), &[0.0, 0.7]);
        assert_eq!(tr.last(), &expected.pattern);
    }

    #[test]
    fn seeded_poisson_run_interlaces() {
        let init = DiscretePattern::packed(4).unwrap();
        let d = poisson_driver(4, 1.0, 5.0, SeedSpec::new(2024, 0)).unwrap();
        let tr = run_dynamics(&init, &d, 5.0).unwrap();
        assert!(tr.len() > 1);
        for (t, p) in tr.iter() {
            assert!(p.is_valid(), "t = {t}: {p}");
        }
    }

    #[test]
    fn horizon_truncates_and_samples_agree() {
        let init = DiscretePattern::packed(3).unwrap();
        let d = poisson_driver(3, 1.0, 10.0, SeedSpec::new(5, 1)).unwrap();
        let full = run_dynamics(&init, &d, 10.0).unwrap();
        let part = run_dynamics(&init, &d, 4.0).unwrap();
        assert!(part.times().iter().all(|&t| t <= 4.0));
        assert_eq!(part.last(), full.state_at(4.0));
        let times = [0.0, 1.0, 2.5, 2.5, 9.0, 10.0];
        let sampled = sample_dynamics(&init, &d, &times).unwrap();
        for (t, p) in times.iter().zip(&sampled) {
            assert_eq!(p, full.state_at(*t));
        }
        assert!(run_dynamics(&init, &d, 11.0).is_err());
    }

    #[test]
    fn records_follow_trajectory() {
        let init = DiscretePattern::packed(3).unwrap();
        let d = poisson_driver(3, 1.0, 6.0, SeedSpec::new(8, 0)).unwrap();
        let (tr, recs) = run_dynamics_recorded(&init, &d, 6.0).unwrap();
        assert_eq!(recs.len() + 1, tr.len());
        assert_eq!(tr, run_dynamics(&init, &d, 6.0).unwrap());
        for (k, r) in recs.iter().enumerate() {
            let before = &tr.states()[k];
            let after = &tr.states()[k + 1];
            for s in crate::pattern::slots(3) {
                let delta = after.get(s) - before.get(s);
                let expected = match r.outcome(s) {
                    Outcome::MovedUp | Outcome::PushedUp { .. } => 1,
                    Outcome::MovedDown | Outcome::PushedDown { .. } => -1,
                    Outcome::Idle | Outcome::Blocked { .. } => 0,
                };
                assert_eq!(delta, expected);
                if let Outcome::PushedUp { by } | Outcome::PushedDown { by } | Outcome::Blocked { by } = r.outcome(s) {
                    assert_eq!(by.level + 1, s.level);
                }
            }
        }
    }
}
