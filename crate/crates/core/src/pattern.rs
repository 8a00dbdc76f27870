//! Gelfand-Tsetlin patterns: triangular arrays `x[i][j]`, `1 <= i <= j <= N`,
//! stored level by level in one flat vector.
//!
//! Slot `(i, j)` lives at flat offset `j(j-1)/2 + (i-1)`, so level 1 occupies
//! offset 0, level 2 offsets 1..=2, level 3 offsets 3..=5 and so on.
//!
//! Two interlacing regimes are supported. Integer patterns require
//!
//! ```text
//! x[i-1][j] < x[i-1][j-1] <= x[i][j]
//! ```
//!
//! and real patterns relax the strict part to `<=`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Position `(index, level)` of a particle, both 1-based, `index <= level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelIndex {
    pub level: usize,
    pub index: usize,
}

impl LevelIndex {
    pub fn new(level: usize, index: usize) -> Result<Self, PatternError> {
        if level == 0 || index == 0 || index > level {
            return Err(PatternError::BadIndex { level, index });
        }
        Ok(Self { level, index })
    }

    /// Flat offset in the level-major triangular layout.
    #[inline]
    pub fn offset(self) -> usize {
        self.level * (self.level - 1) / 2 + (self.index - 1)
    }

    /// Inverse of [`LevelIndex::offset`].
    pub fn from_offset(offset: usize) -> Self {
        // largest level with level(level-1)/2 <= offset
        let mut level = (((8 * offset + 1) as f64).sqrt() as usize).div_ceil(2);
        while level * (level - 1) / 2 > offset {
            level -= 1;
        }
        while (level + 1) * level / 2 <= offset {
            level += 1;
        }
        Self {
            level,
            index: offset - level * (level - 1) / 2 + 1,
        }
    }
}

impl fmt::Display for LevelIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.index, self.level)
    }
}

/// Number of slots in a pattern with `size` levels.
#[inline]
pub const fn slot_count(size: usize) -> usize {
    size * (size + 1) / 2
}

/// Iterates over every slot of a size-`size` pattern in flat order.
pub fn slots(size: usize) -> impl Iterator<Item = LevelIndex> {
    (1..=size).flat_map(|level| (1..=level).map(move |index| LevelIndex { level, index }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inequality {
    /// `x[i-1][j] < x[i-1][j-1]` (or `<=` for real patterns)
    Lower,
    /// `x[i-1][j-1] <= x[i][j]`
    Upper,
}

/// One failed interlacing inequality, naming the three particles involved.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub inequality: Inequality,
    pub left: LevelIndex,
    pub middle: LevelIndex,
    pub right: LevelIndex,
    pub values: [f64; 3],
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [l, m, r] = self.values;
        let which = match self.inequality {
            Inequality::Lower => format!("left {} = {l} vs middle {} = {m}", self.left, self.middle),
            Inequality::Upper => {
                format!("middle {} = {m} vs right {} = {r}", self.middle, self.right)
            }
        };
        write!(f, "interlacing fails: {which}")
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatternError {
    #[error("pattern size must be at least 1")]
    ZeroSize,
    #[error("no slot (i = {index}, j = {level})")]
    BadIndex { level: usize, index: usize },
    #[error("level {level} has {found} entries, expected {level}")]
    Structure { level: usize, found: usize },
    #[error("expected {expected} values for size {size}, got {found}")]
    FlatLength { size: usize, expected: usize, found: usize },
    #[error("{} interlacing violation(s); first: {}", .0.len(), .0[0])]
    Interlacing(Vec<Violation>),
    #[error("cannot parse pattern text: {0}")]
    Parse(String),
}

/// Triangular array of coordinates. Holding a `Pattern` does not imply it
/// interlaces; call [`DiscretePattern::validate`] or
/// [`ContinuousPattern::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern<T> {
    size: usize,
    values: Vec<T>,
}

pub type DiscretePattern = Pattern<i64>;
pub type ContinuousPattern = Pattern<f64>;

impl<T: Copy> Pattern<T> {
    pub fn from_flat(size: usize, values: Vec<T>) -> Result<Self, PatternError> {
        if size == 0 {
            return Err(PatternError::ZeroSize);
        }
        if values.len() != slot_count(size) {
            return Err(PatternError::FlatLength {
                size,
                expected: slot_count(size),
                found: values.len(),
            });
        }
        Ok(Self { size, values })
    }

    /// Builds a pattern from `levels[j-1][i-1]`; level `j` must have `j` entries.
    pub fn from_levels<L: AsRef<[T]>>(levels: &[L]) -> Result<Self, PatternError> {
        if levels.is_empty() {
            return Err(PatternError::ZeroSize);
        }
        let mut values = Vec::with_capacity(slot_count(levels.len()));
        for (j, level) in levels.iter().enumerate() {
            let level = level.as_ref();
            if level.len() != j + 1 {
                return Err(PatternError::Structure {
                    level: j + 1,
                    found: level.len(),
                });
            }
            values.extend_from_slice(level);
        }
        Ok(Self {
            size: levels.len(),
            values,
        })
    }

    pub fn filled(size: usize, value: T) -> Result<Self, PatternError> {
        Self::from_flat(size, vec![value; slot_count(size)])
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, slot: LevelIndex) -> T {
        self.values[slot.offset()]
    }

    /// Value at `(index, level)`, 1-based.
    #[inline]
    pub fn at(&self, index: usize, level: usize) -> T {
        self.values[LevelIndex { level, index }.offset()]
    }

    #[inline]
    pub fn set(&mut self, slot: LevelIndex, value: T) {
        self.values[slot.offset()] = value;
    }

    pub fn level(&self, level: usize) -> &[T] {
        let start = level * (level - 1) / 2;
        &self.values[start..start + level]
    }

    pub(crate) fn level_mut(&mut self, level: usize) -> &mut [T] {
        let start = level * (level - 1) / 2;
        &mut self.values[start..start + level]
    }

    pub fn as_flat(&self) -> &[T] {
        &self.values
    }

    pub fn levels(&self) -> impl Iterator<Item = &[T]> {
        (1..=self.size).map(move |j| self.level(j))
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(T) -> U) -> Pattern<U> {
        Pattern {
            size: self.size,
            values: self.values.iter().copied().map(f).collect(),
        }
    }

    /// The first `levels` levels as a smaller pattern.
    pub fn truncate(&self, levels: usize) -> Result<Self, PatternError> {
        if levels == 0 || levels > self.size {
            return Err(PatternError::ZeroSize);
        }
        Ok(Self {
            size: levels,
            values: self.values[..slot_count(levels)].to_vec(),
        })
    }
}

fn collect_violations<T: Copy + Into<f64>>(
    p: &Pattern<T>,
    lower_ok: impl Fn(T, T) -> bool,
    upper_ok: impl Fn(T, T) -> bool,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for j in 2..=p.size {
        for i in 2..=j {
            let left = LevelIndex { level: j, index: i - 1 };
            let middle = LevelIndex {
                level: j - 1,
                index: i - 1,
            };
            let right = LevelIndex { level: j, index: i };
            let (l, m, r) = (p.get(left), p.get(middle), p.get(right));
            let values = [l.into(), m.into(), r.into()];
            if !lower_ok(l, m) {
                out.push(Violation {
                    inequality: Inequality::Lower,
                    left,
                    middle,
                    right,
                    values,
                });
            }
            if !upper_ok(m, r) {
                out.push(Violation {
                    inequality: Inequality::Upper,
                    left,
                    middle,
                    right,
                    values,
                });
            }
        }
    }
    out
}

impl DiscretePattern {
    /// The densely packed configuration `x[i][j] = i - j`, the minimal
    /// integer pattern with `x[1][1] = 0`.
    pub fn packed(size: usize) -> Result<Self, PatternError> {
        if size == 0 {
            return Err(PatternError::ZeroSize);
        }
        let values = slots(size).map(|s| s.index as i64 - s.level as i64).collect();
        Ok(Self { size, values })
    }

    /// Every failed integer interlacing inequality.
    pub fn violations(&self) -> Vec<Violation> {
        // i64 -> f64 is exact for any coordinate the dynamics can reach
        let as_f = Pattern {
            size: self.size,
            values: self.values.iter().map(|&v| v as f64).collect(),
        };
        collect_violations(&as_f, |l, m| l < m, |m, r| m <= r)
    }

    pub fn validate(&self) -> Result<(), PatternError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(PatternError::Interlacing(v))
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn to_continuous(&self) -> ContinuousPattern {
        self.map(|v| v as f64)
    }
}

impl ContinuousPattern {
    pub fn zeros(size: usize) -> Result<Self, PatternError> {
        Self::filled(size, 0.0)
    }

    /// Weak interlacing violations, each inequality allowed to fail by `slack`.
    pub fn violations_with_slack(&self, slack: f64) -> Vec<Violation> {
        collect_violations(self, |l, m| l <= m + slack, |m, r| m <= r + slack)
    }

    pub fn violations(&self) -> Vec<Violation> {
        self.violations_with_slack(0.0)
    }

    pub fn validate_with_slack(&self, slack: f64) -> Result<(), PatternError> {
        let v = self.violations_with_slack(slack);
        if v.is_empty() {
            Ok(())
        } else {
            Err(PatternError::Interlacing(v))
        }
    }

    pub fn validate(&self) -> Result<(), PatternError> {
        self.validate_with_slack(0.0)
    }
}

/// Checks integer interlacing of a ragged level list, reporting missing
/// entries as [`PatternError::Structure`] rather than as a violation.
pub fn validate_discrete(levels: &[Vec<i64>]) -> Result<(), PatternError> {
    DiscretePattern::from_levels(levels)?.validate()
}

/// Weak-inequality counterpart of [`validate_discrete`].
pub fn validate_continuous(levels: &[Vec<f64>]) -> Result<(), PatternError> {
    ContinuousPattern::from_levels(levels)?.validate()
}

/// Text form: one line per level, level 1 first, values separated by spaces.
impl<T: Copy + fmt::Display> fmt::Display for Pattern<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, level) in self.levels().enumerate() {
            if j > 0 {
                writeln!(f)?;
            }
            for (i, v) in level.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

impl<T> FromStr for Pattern<T>
where
    T: Copy + FromStr,
    T::Err: fmt::Display,
{
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let levels = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|line| {
                line.split_whitespace()
                    .map(|tok| {
                        tok.parse::<T>()
                            .map_err(|e| PatternError::Parse(format!("`{tok}`: {e}")))
                    })
                    .collect::<Result<Vec<T>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_levels(&levels)
    }
}
