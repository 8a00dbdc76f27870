//! Unit-step driving processes.
//!
//! A [`DrivingPath`] is a càdlàg integer path per slot, stored as initial
//! values plus a time-sorted list of ±1 jumps. Discrete-time drivers are
//! extended to continuous time by holding `X(n)` on `[n, n+1)`, so their
//! jumps sit exactly on the integers.
//!
//! All generators draw from ChaCha8 seeded by [`SeedSpec`]: the master seed
//! keys the generator and the stream id selects one of its 2^64 independent
//! streams (each of period 2^68 bytes).

use std::cmp::Ordering;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

use crate::pattern::{slot_count, slots, LevelIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SeedSpec {
    pub master: u64,
    pub stream: u64,
}

impl SeedSpec {
    pub const fn new(master: u64, stream: u64) -> Self {
        Self { master, stream }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }

    pub const fn with_stream(self, stream: u64) -> Self {
        Self {
            master: self.master,
            stream,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivingEvent {
    pub time: f64,
    pub slot: LevelIndex,
    pub increment: i8,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DrivingError {
    #[error("{0}")]
    Domain(String),
    #[error("jump of size {increment} at time {time} in slot {slot}: increments must be ±1")]
    Regularity {
        time: f64,
        slot: LevelIndex,
        increment: i64,
    },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

fn format_err(line: usize, msg: impl Into<String>) -> DrivingError {
    DrivingError::Format { line, msg: msg.into() }
}

/// A regular (càdlàg, unit-jump) driving path on `N(N+1)/2` slots.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingPath {
    size: usize,
    initial: Vec<i64>,
    events: Vec<DrivingEvent>,
    horizon: f64,
}

impl DrivingPath {
    /// Validates and builds a path. Event times must lie in `(0, horizon]`,
    /// be nondecreasing, and never repeat within a slot.
    pub fn new(size: usize, initial: Vec<i64>, events: Vec<DrivingEvent>, horizon: f64) -> Result<Self, DrivingError> {
        if size == 0 {
            return Err(DrivingError::Domain("driving path needs at least one level".into()));
        }
        if initial.len() != slot_count(size) {
            return Err(DrivingError::Domain(format!(
                "expected {} initial values, got {}",
                slot_count(size),
                initial.len()
            )));
        }
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(DrivingError::Domain(format!("bad horizon {horizon}")));
        }
        // last event time seen per slot, for the duplicate check
        let mut last = vec![f64::NEG_INFINITY; slot_count(size)];
        let mut prev = 0.0;
        for (k, e) in events.iter().enumerate() {
            if e.slot.level > size || e.slot.index == 0 || e.slot.index > e.slot.level {
                return Err(format_err(k, format!("slot {} outside a size-{size} pattern", e.slot)));
            }
            if e.increment != 1 && e.increment != -1 {
                return Err(DrivingError::Regularity {
                    time: e.time,
                    slot: e.slot,
                    increment: e.increment.into(),
                });
            }
            if !(e.time > 0.0 && e.time <= horizon) {
                return Err(format_err(k, format!("event time {} outside (0, {horizon}]", e.time)));
            }
            if e.time < prev {
                return Err(format_err(k, format!("event time {} precedes {prev}", e.time)));
            }
            let off = e.slot.offset();
            if last[off] == e.time {
                return Err(format_err(
                    k,
                    format!("two events at time {} in slot {}", e.time, e.slot),
                ));
            }
            last[off] = e.time;
            prev = e.time;
        }
        Ok(Self {
            size,
            initial,
            events,
            horizon,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn events(&self) -> &[DrivingEvent] {
        &self.events
    }

    pub fn initial(&self, slot: LevelIndex) -> i64 {
        self.initial[slot.offset()]
    }

    pub fn initial_values(&self) -> &[i64] {
        &self.initial
    }

    /// Same increments, different starting values.
    pub fn with_initial(&self, initial: Vec<i64>) -> Result<Self, DrivingError> {
        Self::new(self.size, initial, self.events.clone(), self.horizon)
    }

    /// Events grouped by time; each group is one discontinuity of `X`.
    pub fn discontinuities(&self) -> impl Iterator<Item = &[DrivingEvent]> {
        self.events.chunk_by(|a, b| a.time == b.time)
    }

    /// `X_slot(t)`.
    pub fn value_at(&self, slot: LevelIndex, t: f64) -> i64 {
        self.initial(slot)
            + self
                .events
                .iter()
                .take_while(|e| e.time <= t)
                .filter(|e| e.slot == slot)
                .map(|e| i64::from(e.increment))
                .sum::<i64>()
    }

    /// Jump times and post-jump values of one slot.
    pub fn slot_steps(&self, slot: LevelIndex) -> Vec<(f64, i64)> {
        let mut value = self.initial(slot);
        self.events
            .iter()
            .filter(|e| e.slot == slot)
            .map(|e| {
                value += i64::from(e.increment);
                (e.time, value)
            })
            .collect()
    }

    /// Number of jumps per slot, in flat order.
    pub fn event_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; slot_count(self.size)];
        for e in &self.events {
            counts[e.slot.offset()] += 1;
        }
        counts
    }

    /// Event-list CSV: a `# horizon` / `# init j i value` comment block, then
    /// `time,level,index,increment` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# horizon {}", self.horizon);
        for s in slots(self.size) {
            let _ = writeln!(out, "# init {} {} {}", s.level, s.index, self.initial(s));
        }
        out.push_str("time,level,index,increment\n");
        for e in &self.events {
            let _ = writeln!(out, "{},{},{},{}", e.time, e.slot.level, e.slot.index, e.increment);
        }
        out
    }

    /// Parses and validates the event-list CSV written by [`DrivingPath::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self, DrivingError> {
        let mut horizon = None;
        let mut inits: Vec<(usize, usize, i64, usize)> = Vec::new();
        let mut rows: Vec<(usize, f64, usize, usize, i64)> = Vec::new();
        let mut seen_header = false;

        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let mut toks = comment.split_whitespace();
                match toks.next() {
                    Some("horizon") => {
                        let t = toks
                            .next()
                            .and_then(|s| s.parse::<f64>().ok())
                            .ok_or_else(|| format_err(line_no, "malformed `# horizon T`"))?;
                        horizon = Some(t);
                    }
                    Some("init") => {
                        let nums: Vec<&str> = toks.collect();
                        let parsed = match nums.as_slice() {
                            [j, i, v] => j
                                .parse::<usize>()
                                .ok()
                                .zip(i.parse::<usize>().ok())
                                .zip(v.parse::<i64>().ok()),
                            _ => None,
                        };
                        let ((j, i), v) = parsed.ok_or_else(|| format_err(line_no, "malformed `# init j i value`"))?;
                        inits.push((j, i, v, line_no));
                    }
                    _ => {}
                }
                continue;
            }
            if !seen_header {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols != ["time", "level", "index", "increment"] {
                    return Err(format_err(line_no, "expected header `time,level,index,increment`"));
                }
                seen_header = true;
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(format_err(line_no, format!("expected 4 columns, got {}", cols.len())));
            }
            let time = cols[0]
                .parse::<f64>()
                .map_err(|_| format_err(line_no, format!("bad time `{}`", cols[0])))?;
            let level = cols[1]
                .parse::<usize>()
                .map_err(|_| format_err(line_no, format!("bad level `{}`", cols[1])))?;
            let index = cols[2]
                .parse::<usize>()
                .map_err(|_| format_err(line_no, format!("bad index `{}`", cols[2])))?;
            let inc = cols[3]
                .parse::<i64>()
                .map_err(|_| format_err(line_no, format!("bad increment `{}`", cols[3])))?;
            rows.push((line_no, time, level, index, inc));
        }

        if !seen_header {
            return Err(format_err(0, "missing header `time,level,index,increment`"));
        }
        let horizon = horizon.ok_or_else(|| format_err(0, "missing `# horizon T`"))?;
        let size = inits
            .iter()
            .map(|&(j, ..)| j)
            .chain(rows.iter().map(|&(_, _, j, _, _)| j))
            .max()
            .ok_or_else(|| format_err(0, "no `# init` lines and no events"))?;
        if size == 0 {
            return Err(format_err(0, "level 0 does not exist"));
        }

        let mut initial = vec![None; slot_count(size)];
        for (j, i, v, line_no) in inits {
            let slot = LevelIndex::new(j, i).map_err(|e| format_err(line_no, e.to_string()))?;
            if initial[slot.offset()].replace(v).is_some() {
                return Err(format_err(line_no, format!("slot {slot} initialized twice")));
            }
        }
        let initial = initial
            .into_iter()
            .enumerate()
            .map(|(off, v)| {
                v.ok_or_else(|| format_err(0, format!("missing `# init` for slot {}", LevelIndex::from_offset(off))))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut events = Vec::with_capacity(rows.len());
        let mut row_lines = Vec::with_capacity(rows.len());
        for (line_no, time, level, index, inc) in rows {
            let slot = LevelIndex::new(level, index).map_err(|e| format_err(line_no, e.to_string()))?;
            if inc.abs() != 1 {
                return Err(DrivingError::Regularity {
                    time,
                    slot,
                    increment: inc,
                });
            }
            events.push(DrivingEvent {
                time,
                slot,
                increment: inc as i8,
            });
            row_lines.push(line_no);
        }
        Self::new(size, initial, events, horizon).map_err(|e| match e {
            // report CSV line numbers rather than event positions
            DrivingError::Format { line, msg } => DrivingError::Format {
                line: row_lines.get(line).copied().unwrap_or(0),
                msg,
            },
            other => other,
        })
    }
}

fn sort_events(events: &mut [DrivingEvent]) {
    events.sort_by(|a, b| match a.time.total_cmp(&b.time) {
        Ordering::Equal => a.slot.offset().cmp(&b.slot.offset()),
        o => o,
    });
}

/// Independent Poisson clocks of the given rate on every slot, started at 0.
pub fn poisson_driver(size: usize, rate: f64, horizon: f64, seed: SeedSpec) -> Result<DrivingPath, DrivingError> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(DrivingError::Domain(format!(
            "Poisson rate must be positive, got {rate}"
        )));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(DrivingError::Domain(format!("bad horizon {horizon}")));
    }
    if size == 0 {
        return Err(DrivingError::Domain("driving path needs at least one level".into()));
    }
    let exp = Exp::new(rate).map_err(|e| DrivingError::Domain(e.to_string()))?;
    let mut rng = seed.rng();
    let mut events = Vec::new();
    for slot in slots(size) {
        let mut t = 0.0;
        loop {
            t += exp.sample(&mut rng);
            if t > horizon {
                break;
            }
            // an Exp draw of exactly 0 would put two jumps at one instant
            if t > 0.0
                && events
                    .last()
                    .is_none_or(|e: &DrivingEvent| e.slot != slot || e.time < t)
            {
                events.push(DrivingEvent {
                    time: t,
                    slot,
                    increment: 1,
                });
            }
        }
    }
    sort_events(&mut events);
    DrivingPath::new(size, vec![0; slot_count(size)], events, horizon)
}

/// Shared body of the discrete-time drivers: `step` maps one uniform draw to
/// an increment in {-1, 0, 1}, which lands at integer time `s + 1`.
fn discrete_time_driver(
    size: usize,
    steps: u64,
    seed: SeedSpec,
    mut step: impl FnMut(f64) -> i8,
) -> Result<DrivingPath, DrivingError> {
    if size == 0 {
        return Err(DrivingError::Domain("driving path needs at least one level".into()));
    }
    let mut rng = seed.rng();
    let mut events = Vec::new();
    for slot in slots(size) {
        for s in 0..steps {
            let inc = step(rng.random::<f64>());
            if inc != 0 {
                events.push(DrivingEvent {
                    time: (s + 1) as f64,
                    slot,
                    increment: inc,
                });
            }
        }
    }
    sort_events(&mut events);
    DrivingPath::new(size, vec![0; slot_count(size)], events, steps as f64)
}

/// `X(t) = sum_{s < t} xi(s)` with i.i.d. Bernoulli(p) `xi`, held constant
/// between integers.
pub fn bernoulli_driver(size: usize, p: f64, steps: u64, seed: SeedSpec) -> Result<DrivingPath, DrivingError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(DrivingError::Domain(format!("Bernoulli p must lie in [0, 1], got {p}")));
    }
    discrete_time_driver(size, steps, seed, |u| i8::from(u < p))
}

/// Lazy walk: +1 with probability q, -1 with probability q, else 0.
pub fn lazy_walk_driver(size: usize, q: f64, steps: u64, seed: SeedSpec) -> Result<DrivingPath, DrivingError> {
    if !(0.0..=0.5).contains(&q) {
        return Err(DrivingError::Domain(format!(
            "lazy-walk q must lie in [0, 1/2], got {q}"
        )));
    }
    discrete_time_driver(size, steps, seed, |u| {
        if u < q {
            1
        } else if u < 2.0 * q {
            -1
        } else {
            0
        }
    })
}

/// The built-in driver families with their parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriverKind {
    Poisson { rate: f64 },
    Bernoulli { p: f64 },
    Lazy { q: f64 },
}

impl DriverKind {
    /// Looks up a driver family by name, taking the parameter it needs.
    pub fn from_name(name: &str, rate: f64, p: f64, q: f64) -> Result<Self, DrivingError> {
        match name {
            "poisson" => Ok(Self::Poisson { rate }),
            "bernoulli" => Ok(Self::Bernoulli { p }),
            "lazy" => Ok(Self::Lazy { q }),
            other => Err(DrivingError::Domain(format!(
                "unknown driver `{other}` (expected poisson, bernoulli or lazy)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Poisson { .. } => "poisson",
            Self::Bernoulli { .. } => "bernoulli",
            Self::Lazy { .. } => "lazy",
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            Self::Poisson { rate } => rate,
            Self::Bernoulli { p } => p,
            Self::Lazy { q } => q,
        }
    }

    pub fn is_discrete_time(&self) -> bool {
        !matches!(self, Self::Poisson { .. })
    }

    /// Generates a path reaching at least `horizon`; discrete-time drivers
    /// run `ceil(horizon)` steps.
    pub fn generate(&self, size: usize, horizon: f64, seed: SeedSpec) -> Result<DrivingPath, DrivingError> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(DrivingError::Domain(format!("bad horizon {horizon}")));
        }
        match *self {
            Self::Poisson { rate } => poisson_driver(size, rate, horizon, seed),
            Self::Bernoulli { p } => bernoulli_driver(size, p, horizon.ceil() as u64, seed),
            Self::Lazy { q } => lazy_walk_driver(size, q, horizon.ceil() as u64, seed),
        }
    }
}

/// Alias for [`DrivingPath::from_csv`].
pub fn ingest_path(text: &str) -> Result<DrivingPath, DrivingError> {
    DrivingPath::from_csv(text)
}
