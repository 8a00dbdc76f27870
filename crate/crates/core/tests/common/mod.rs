//! Oracles and case generators shared by the integration tests and the
//! acceptance runner. The oracles are written from scratch against the
//! definitions and do not call the routines they check.

#![allow(dead_code)]

use interlace::{
    slot_count, slots, DiscretePattern, DriverKind, DrivingEvent, DrivingPath, LevelIndex, PiecewisePath, SeedSpec,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn slot(level: usize, index: usize) -> LevelIndex {
    LevelIndex::new(level, index).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly-shaped random valid discrete pattern: the top level is a
/// strictly increasing sequence, and each lower slot `(i, j-1)` is drawn
/// from `[x(i, j) + 1, x(i+1, j)]`.
pub fn random_discrete_pattern(size: usize, rng: &mut impl Rng) -> DiscretePattern {
    let mut levels: Vec<Vec<i64>> = vec![Vec::new(); size];
    let mut x = rng.random_range(-6..=0i64);
    for _ in 0..size {
        levels[size - 1].push(x);
        x += rng.random_range(1..=3);
    }
    for j in (1..size).rev() {
        let upper = levels[j].clone();
        levels[j - 1] = (0..j).map(|i| rng.random_range(upper[i] + 1..=upper[i + 1])).collect();
    }
    DiscretePattern::from_levels(&levels).unwrap()
}

/// Direct interlacing check for discrete levels:
/// `x[i-1][j] < x[i-1][j-1] <= x[i][j]`, levels indexed from 0.
pub fn discrete_interlaces(levels: &[Vec<i64>]) -> bool {
    (1..levels.len()).all(|j| (0..j).all(|i| levels[j][i] < levels[j - 1][i] && levels[j - 1][i] <= levels[j][i + 1]))
}

pub fn continuous_interlaces(levels: &[Vec<f64>], slack: f64) -> bool {
    (1..levels.len()).all(|j| {
        (0..j).all(|i| levels[j][i] <= levels[j - 1][i] + slack && levels[j - 1][i] <= levels[j][i + 1] + slack)
    })
}

/// Hand-built unit-step paths that stress simultaneous jumps, bursts on one
/// slot and long push cascades.
pub fn adversarial_driver(size: usize, variant: usize, rng: &mut impl Rng) -> DrivingPath {
    let n = slot_count(size);
    let mut events = Vec::new();
    let steps = 60 + rng.random_range(0..40);
    for s in 1..=steps {
        let t = s as f64 * 0.5;
        match variant % 5 {
            // every slot jumps together, same sign
            0 => {
                let inc = if rng.random_bool(0.7) { 1 } else { -1 };
                for off in 0..n {
                    events.push(DrivingEvent {
                        time: t,
                        slot: LevelIndex::from_offset(off),
                        increment: inc,
                    });
                }
            }
            // level 1 oscillates; everything above is quiet
            1 => events.push(DrivingEvent {
                time: t,
                slot: slot(1, 1),
                increment: if s % 4 < 2 { 1 } else { -1 },
            }),
            // random subsets with random signs
            2 => {
                for off in 0..n {
                    if rng.random_bool(0.5) {
                        events.push(DrivingEvent {
                            time: t,
                            slot: LevelIndex::from_offset(off),
                            increment: if rng.random_bool(0.5) { 1 } else { -1 },
                        });
                    }
                }
            }
            // outermost slots drift apart while inner ones hold still
            3 => {
                for k in 1..=size {
                    let (left, right) = (slot(k, 1), slot(k, k));
                    events.push(DrivingEvent {
                        time: t,
                        slot: left,
                        increment: -1,
                    });
                    if k > 1 {
                        events.push(DrivingEvent {
                            time: t,
                            slot: right,
                            increment: 1,
                        });
                    }
                }
            }
            // one random slot per time, biased to push upward
            _ => {
                let off = rng.random_range(0..n);
                events.push(DrivingEvent {
                    time: t,
                    slot: LevelIndex::from_offset(off),
                    increment: if rng.random_bool(0.8) { 1 } else { -1 },
                });
            }
        }
    }
    let mut order: Vec<usize> = (0..events.len()).collect();
    // shuffle within each time to make sure order of listing does not matter
    order.shuffle(rng);
    order.sort_by(|&a, &b| events[a].time.total_cmp(&events[b].time));
    let events: Vec<_> = order.into_iter().map(|k| events[k]).collect();
    let horizon = steps as f64 * 0.5;
    DrivingPath::new(size, vec![0; n], events, horizon).unwrap()
}

/// One randomized equivalence case: `(driver, initial pattern)`.
pub fn random_case(case: u64) -> (DrivingPath, DiscretePattern, &'static str) {
    let mut r = rng(0xC0FFEE ^ case);
    let size = 1 + (case as usize % 5);
    let initial = random_discrete_pattern(size, &mut r);
    let seed = SeedSpec::new(case, 7);
    // keep every case at or under 500 events
    let budget = 500.0 / slot_count(size) as f64;
    let (driver, label) = match case % 4 {
        0 => (
            DriverKind::Poisson { rate: 1.0 }
                .generate(size, budget.floor(), seed)
                .unwrap(),
            "poisson",
        ),
        1 => (
            DriverKind::Bernoulli {
                p: r.random_range(0.1..0.9),
            }
            .generate(size, (budget / 0.9).floor(), seed)
            .unwrap(),
            "bernoulli",
        ),
        2 => (
            DriverKind::Lazy {
                q: r.random_range(0.1..=0.5),
            }
            .generate(size, budget.floor(), seed)
            .unwrap(),
            "lazy",
        ),
        _ => {
            let variant = (case / 4) as usize;
            (adversarial_driver(size, variant, &mut r), "adversarial")
        }
    };
    (cap_events(driver, 500), initial, label)
}

/// The first `max` events of `driver`, same horizon.
pub fn cap_events(driver: DrivingPath, max: usize) -> DrivingPath {
    if driver.events().len() <= max {
        return driver;
    }
    DrivingPath::new(
        driver.size(),
        driver.initial_values().to_vec(),
        driver.events()[..max].to_vec(),
        driver.horizon(),
    )
    .unwrap()
}

/// `x_1^k` of a TASEP with `k = 1` leading, started at `1 - k`: particle
/// `k` jumps right on its own clock unless particle `k - 1` sits directly
/// ahead.
pub struct Tasep {
    pub positions: Vec<i64>,
}

impl Tasep {
    pub fn packed(n: usize) -> Self {
        Self {
            positions: (1..=n).map(|k| 1 - k as i64).collect(),
        }
    }

    pub fn ring(&mut self, k: usize) {
        let idx = k - 1;
        if idx == 0 || self.positions[idx - 1] > self.positions[idx] + 1 {
            self.positions[idx] += 1;
        }
    }
}

/// Stepwise clamp at every time in the union of breakpoints, reading each
/// path through `value_at`.
pub fn clamp_oracle(l: &PiecewisePath, r: &PiecewisePath, psi: &PiecewisePath) -> Vec<(f64, f64)> {
    let mut times: Vec<f64> = [l, r, psi]
        .iter()
        .flat_map(|p| p.breaks().iter().map(|b| b.0))
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut phi = psi.initial().max(l.initial()).min(r.initial());
    let mut prev_psi = psi.initial();
    let mut out = vec![(0.0, phi)];
    for t in times {
        let p = psi.value_at(t);
        phi = (phi + p - prev_psi).max(l.value_at(t)).min(r.value_at(t));
        prev_psi = p;
        out.push((t, phi));
    }
    out
}

/// `psi(t) + max(0, sup_{s<=t} (l(s) - psi(s)))` at each time of `times`.
pub fn lower_closed_form(l: &PiecewisePath, psi: &PiecewisePath, times: &[f64]) -> Vec<f64> {
    let mut sup = 0.0f64;
    times
        .iter()
        .map(|&t| {
            sup = sup.max(l.value_at(t) - psi.value_at(t));
            psi.value_at(t) + sup
        })
        .collect()
}

/// `psi(t) - max(0, sup_{s<=t} (psi(s) - r(s)))`.
pub fn upper_closed_form(r: &PiecewisePath, psi: &PiecewisePath, times: &[f64]) -> Vec<f64> {
    let mut sup = 0.0f64;
    times
        .iter()
        .map(|&t| {
            sup = sup.max(psi.value_at(t) - r.value_at(t));
            psi.value_at(t) - sup
        })
        .collect()
}

/// Random step path with values on the quarter-integer grid, so every sum
/// and clamp in the oracles is exact.
pub fn random_step_path(rng: &mut impl Rng, horizon: f64, jumps: usize, offset: f64) -> PiecewisePath {
    let mut times: Vec<f64> = (0..jumps)
        .map(|_| (rng.random_range(1..=(horizon as i64 * 4)) as f64) / 4.0)
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let q = |rng: &mut dyn rand::RngCore| rng.random_range(-12..=12i64) as f64 / 4.0;
    let initial = offset + q(rng);
    let breaks = times.into_iter().map(|t| (t, offset + q(rng))).collect();
    PiecewisePath::new(initial, breaks, horizon).unwrap()
}

/// Brute-force KS: the largest CDF gap over every sample point.
pub fn quadratic_ks(a: &[f64], b: &[f64]) -> f64 {
    let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
    a.iter()
        .chain(b)
        .map(|&x| (cdf(a, x) - cdf(b, x)).abs())
        .fold(0.0, f64::max)
}

/// `E[gap]` for the 2x2 Gaussian Hermitian matrix with diagonal variance 1
/// and off-diagonal real/imaginary variance 1/2: the gap is
/// `2 sqrt(a^2 + b^2 + c^2)` with `a, b, c ~ N(0, 1/2)`, i.e. `sqrt(2) chi_3`.
/// Integrated numerically against the chi_3 density.
pub fn gue_gap_mean_oracle() -> f64 {
    let density = |r: f64| (2.0 / std::f64::consts::PI).sqrt() * r * r * (-r * r / 2.0).exp();
    let (a, b, n) = (0.0, 20.0, 200_000);
    let h = (b - a) / n as f64;
    // composite Simpson on r * density(r)
    let f = |r: f64| r * density(r);
    let mut s = f(a) + f(b);
    for k in 1..n {
        let x = a + k as f64 * h;
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    2.0f64.sqrt() * s * h / 3.0
}

/// Every slot of `levels`, flat order.
pub fn all_slots(size: usize) -> Vec<LevelIndex> {
    slots(size).collect()
}
