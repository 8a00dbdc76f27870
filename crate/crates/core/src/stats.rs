//! Statistical references: Gaussian Hermitian corners, two-sample
//! Kolmogorov-Smirnov distance, moment summaries, and sample dumps.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{Complex, DMatrix};
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use thiserror::Error;

use crate::driving::SeedSpec;
use crate::pattern::{slots, ContinuousPattern, LevelIndex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("{0}")]
    Domain(String),
    #[error("sample dump line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// A labelled set of draws of one real marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub label: String,
    pub values: Vec<f64>,
}

impl SampleSet {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            values,
        }
    }

    pub fn ks(&self, other: &SampleSet) -> Result<f64, StatsError> {
        empirical_ks(&self.values, &other.values)
    }

    pub fn summary(&self) -> Result<MomentSummary, StatsError> {
        moment_summary(&self.values)
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
fn hermitian_eigenvalues(m: DMatrix<Complex<f64>>) -> Vec<f64> {
    let mut ev: Vec<f64> = match m.nrows() {
        1 => vec![m[(0, 0)].re],
        _ => m.symmetric_eigenvalues().iter().copied().collect(),
    };
    ev.sort_by(f64::total_cmp);
    ev
}

/// Draws an `N x N` Hermitian matrix with standard normal diagonal and
/// off-diagonal entries whose real and imaginary parts have variance 1/2,
/// scales it by `sqrt(t)`, and returns the ascending eigenvalues of every
/// top-left `k x k` corner as level `k`.
pub fn gue_corners_sample(size: usize, t: f64, seed: SeedSpec) -> Result<ContinuousPattern, StatsError> {
    if size == 0 {
        return Err(StatsError::Domain("matrix size must be at least 1".into()));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(StatsError::Domain(format!("time must be positive, got {t}")));
    }
    let mut rng = seed.rng();
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = DMatrix::<Complex<f64>>::zeros(size, size);
    for r in 0..size {
        let d: f64 = StandardNormal.sample(&mut rng);
        h[(r, r)] = Complex::new(d, 0.0);
        for c in r + 1..size {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let z = Complex::new(half * re, half * im);
            h[(r, c)] = z;
            h[(c, r)] = z.conj();
        }
    }
    // eigenvalues of sqrt(t) H are sqrt(t) times those of H
    let scale = t.sqrt();
    let mut values = Vec::with_capacity(crate::pattern::slot_count(size));
    for k in 1..=size {
        let corner = h.view((0, 0), (k, k)).into_owned();
        values.extend(hermitian_eigenvalues(corner).into_iter().map(|v| v * scale));
    }
    Ok(ContinuousPattern::from_flat(size, values).expect("one eigenvalue per slot"))
}

/// Two-sample Kolmogorov-Smirnov statistic `sup_x |F_a(x) - F_b(x)|`,
/// computed exactly by merging the sorted samples.
pub fn empirical_ks(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::Domain("KS distance needs two nonempty samples".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(StatsError::Domain("samples contain NaN".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSummary {
    pub mean: f64,
    /// Unbiased (divisor `count - 1`); 0 for a single value.
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

pub fn moment_summary(a: &[f64]) -> Result<MomentSummary, StatsError> {
    if a.is_empty() {
        return Err(StatsError::Domain("cannot summarize an empty sample".into()));
    }
    let n = a.len() as f64;
    let mean = a.iter().sum::<f64>() / n;
    let variance = if a.len() > 1 {
        a.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(MomentSummary {
        mean,
        variance,
        min: a.iter().copied().fold(f64::INFINITY, f64::min),
        max: a.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        count: a.len(),
    })
}

/// Cross-sections from many replicas; CSV form `replica,level,index,value`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDump {
    pub size: usize,
    pub replicas: Vec<ContinuousPattern>,
}

impl SampleDump {
    pub fn new(size: usize, replicas: Vec<ContinuousPattern>) -> Result<Self, StatsError> {
        if let Some(p) = replicas.iter().find(|p| p.size() != size) {
            return Err(StatsError::Domain(format!(
                "replica has {} levels, dump has {size}",
                p.size()
            )));
        }
        Ok(Self { size, replicas })
    }

    pub fn marginal(&self, slot: LevelIndex) -> SampleSet {
        SampleSet::new(
            format!("x[{}][{}]", slot.index, slot.level),
            self.replicas.iter().map(|p| p.get(slot)).collect(),
        )
    }

    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::from("replica,level,index,value\n");
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        for (r, p) in self.replicas.iter().enumerate() {
            for s in slots(self.size) {
                let _ = writeln!(out, "{r},{},{},{}", s.level, s.index, p.get(s));
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, StatsError> {
        let err = |line: usize, msg: String| StatsError::Format { line, msg };
        let mut rows: BTreeMap<usize, BTreeMap<(usize, usize), f64>> = BTreeMap::new();
        let mut header = false;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header {
                if line
                    .split(',')
                    .map(str::trim)
                    .ne(["replica", "level", "index", "value"])
                {
                    return Err(err(k + 1, "expected header `replica,level,index,value`".into()));
                }
                header = true;
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed = match cols.as_slice() {
                [r, j, i, v] => r
                    .parse::<usize>()
                    .ok()
                    .zip(j.parse::<usize>().ok())
                    .zip(i.parse::<usize>().ok())
                    .zip(v.parse::<f64>().ok()),
                _ => None,
            };
            let (((r, j), i), v) = parsed.ok_or_else(|| err(k + 1, format!("bad row `{line}`")))?;
            LevelIndex::new(j, i).map_err(|e| err(k + 1, e.to_string()))?;
            if rows.entry(r).or_default().insert((j, i), v).is_some() {
                return Err(err(k + 1, format!("duplicate entry for replica {r}, slot ({i}, {j})")));
            }
        }
        if !header {
            return Err(err(0, "missing header `replica,level,index,value`".into()));
        }
        let size = rows
            .values()
            .flat_map(|m| m.keys().map(|&(j, _)| j))
            .max()
            .ok_or_else(|| StatsError::Domain("sample dump has no rows".into()))?;
        let replicas = rows
            .into_iter()
            .map(|(r, m)| {
                let values = slots(size)
                    .map(|s| {
                        m.get(&(s.level, s.index))
                            .copied()
                            .ok_or_else(|| StatsError::Domain(format!("replica {r} lacks slot {s}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(ContinuousPattern::from_flat(size, values).expect("full triangle"))
            })
            .collect::<Result<Vec<_>, StatsError>>()?;
        Self::new(size, replicas)
    }
}
