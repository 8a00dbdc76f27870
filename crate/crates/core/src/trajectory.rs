//! Time-indexed records of whole patterns.

use std::fmt::{self, Write as _};

use crate::pattern::{slots, LevelIndex, Pattern};

/// Piecewise-constant, right-continuous record: `states[k]` holds on
/// `[times[k], times[k+1])`. Times are nondecreasing; a repeated time is
/// never produced by the engines here but is tolerated by lookups.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    times: Vec<f64>,
    states: Vec<Pattern<T>>,
}

pub type DiscreteTrajectory = Trajectory<i64>;

impl<T: Copy> Trajectory<T> {
    pub fn new(initial: Pattern<T>) -> Self {
        Self {
            times: vec![0.0],
            states: vec![initial],
        }
    }

    pub(crate) fn from_parts(times: Vec<f64>, states: Vec<Pattern<T>>) -> Self {
        debug_assert_eq!(times.len(), states.len());
        debug_assert!(times.windows(2).all(|w| w[0] <= w[1]));
        Self { times, states }
    }

    pub(crate) fn push(&mut self, time: f64, state: Pattern<T>) {
        self.times.push(time);
        self.states.push(state);
    }

    pub fn size(&self) -> usize {
        self.states[0].size()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Pattern<T>] {
        &self.states
    }

    pub fn initial(&self) -> &Pattern<T> {
        &self.states[0]
    }

    pub fn last(&self) -> &Pattern<T> {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &Pattern<T>)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    /// State in force at time `t` (the last record with time `<= t`).
    pub fn state_at(&self, t: f64) -> &Pattern<T> {
        let k = self.times.partition_point(|&s| s <= t);
        &self.states[k.saturating_sub(1)]
    }

    /// `(time, value)` for one slot across every record.
    pub fn slot_series(&self, slot: LevelIndex) -> Vec<(f64, T)> {
        self.iter().map(|(t, p)| (t, p.get(slot))).collect()
    }
}

impl<T: Copy + fmt::Display> Trajectory<T> {
    /// CSV with header `time,level,index,value`, one row per (record, slot).
    /// `comments` are emitted as `# ...` lines right after the header.
    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::from("time,level,index,value\n");
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        let size = self.size();
        for (t, p) in self.iter() {
            for s in slots(size) {
                let _ = writeln!(out, "{t},{},{},{}", s.level, s.index, p.get(s));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::DiscretePattern;

    #[test]
    fn lookup_is_right_continuous() {
        let mut tr = Trajectory::new(DiscretePattern::packed(1).unwrap());
        tr.push(1.0, DiscretePattern::from_flat(1, vec![1]).unwrap());
        tr.push(2.5, DiscretePattern::from_flat(1, vec![2]).unwrap());
        assert_eq!(tr.state_at(0.0).as_flat(), &[0]);
        assert_eq!(tr.state_at(0.999).as_flat(), &[0]);
        assert_eq!(tr.state_at(1.0).as_flat(), &[1]);
        assert_eq!(tr.state_at(100.0).as_flat(), &[2]);
        let csv = tr.to_csv(&["seed 3".into()]);
        assert!(csv.starts_with("time,level,index,value\n# seed 3\n0,1,1,0\n1,1,1,1\n"));
    }
}
