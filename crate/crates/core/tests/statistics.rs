mod common;

use common::*;
use interlace::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

#[test]
fn poisson_event_counts_have_mean_rate() {
    let size = 3;
    let counts: Vec<Vec<usize>> = (0..10_000u64)
        .into_par_iter()
        .map(|r| {
            poisson_driver(size, 1.0, 1.0, SeedSpec::new(40, r))
                .unwrap()
                .event_counts()
        })
        .collect();
    // direct Poisson draws as the reference
    let mut g = ChaCha8Rng::seed_from_u64(41);
    let direct: Vec<f64> = (0..10_000).map(|_| Poisson::new(1.0).unwrap().sample(&mut g)).collect();
    let reference = mean(&direct);
    assert!((reference - 1.0).abs() < 0.03, "{reference}");
    for off in 0..slot_count(size) {
        let m = mean(&counts.iter().map(|c| c[off] as f64).collect::<Vec<_>>());
        assert!((0.97..=1.03).contains(&m), "slot {off}: {m}");
    }
}

#[test]
fn bernoulli_law_of_large_numbers() {
    let steps = 10_000;
    let d = bernoulli_driver(3, 0.5, steps, SeedSpec::new(42, 0)).unwrap();
    let mut g = ChaCha8Rng::seed_from_u64(43);
    let direct = Binomial::new(steps, 0.5).unwrap().sample(&mut g) as f64 / steps as f64;
    assert!((0.47..=0.53).contains(&direct));
    for s in slots(3) {
        let x = d.value_at(s, steps as f64) - d.initial(s);
        let frac = x as f64 / steps as f64;
        assert!((0.47..=0.53).contains(&frac), "{s}: {frac}");
    }
}

#[test]
fn lazy_walk_increment_variance() {
    let steps = 10_000u64;
    let d = lazy_walk_driver(3, 0.5, steps, SeedSpec::new(44, 0)).unwrap();
    for s in slots(3) {
        let mut inc = vec![0.0; steps as usize];
        let mut prev = d.initial(s);
        for (t, x) in d.slot_steps(s) {
            // the jump at time k is the increment of step k
            inc[t as usize - 1] = (x - prev) as f64;
            prev = x;
        }
        let v = variance(&inc);
        assert!((0.97..=1.03).contains(&v), "{s}: {v}");
    }
}

#[test]
fn distinct_slot_counts_are_uncorrelated() {
    let counts: Vec<Vec<usize>> = (0..10_000u64)
        .into_par_iter()
        .map(|r| {
            poisson_driver(2, 1.0, 2.0, SeedSpec::new(45, r))
                .unwrap()
                .event_counts()
        })
        .collect();
    for a in 0..3 {
        for b in (a + 1)..3 {
            let x: Vec<f64> = counts.iter().map(|c| c[a] as f64).collect();
            let y: Vec<f64> = counts.iter().map(|c| c[b] as f64).collect();
            let (mx, my) = (mean(&x), mean(&y));
            let cov = x.iter().zip(&y).map(|(p, q)| (p - mx) * (q - my)).sum::<f64>() / (x.len() - 1) as f64;
            let corr = cov / (variance(&x) * variance(&y)).sqrt();
            assert!(corr.abs() <= 0.05, "slots {a},{b}: {corr}");
        }
    }
}

#[test]
fn brownian_endpoint_variance() {
    let ends: Vec<f64> = brownian_grid(10_000, 1e-3, 1.0, SeedSpec::new(46, 0))
        .unwrap()
        .iter()
        .map(GridPath::last)
        .collect();
    let v = variance(&ends);
    assert!((0.97..=1.03).contains(&v), "{v}");
}

#[test]
fn gue_single_level_is_standard_normal() {
    let draws: Vec<f64> = (0..10_000u64)
        .map(|r| {
            gue_corners_sample(1, 1.0, SeedSpec::new(47, r))
                .unwrap()
                .get(slot(1, 1))
        })
        .collect();
    let s = moment_summary(&draws).unwrap();
    assert!(s.mean.abs() <= 0.03, "{}", s.mean);
    assert!((0.95..=1.05).contains(&s.variance), "{}", s.variance);
}

#[test]
fn gue_two_by_two_gap() {
    let target = gue_gap_mean_oracle();
    assert!((target - 4.0 / std::f64::consts::PI.sqrt()).abs() < 1e-9);
    let gaps: Vec<f64> = (0..10_000u64)
        .map(|r| {
            let p = gue_corners_sample(2, 1.0, SeedSpec::new(48, r)).unwrap();
            p.get(slot(2, 2)) - p.get(slot(2, 1))
        })
        .collect();
    let m = mean(&gaps);
    assert!((2.21..=2.31).contains(&m), "{m}");
}

#[test]
fn gue_corners_interlace() {
    for r in 0..500 {
        let p = gue_corners_sample(5, 2.0, SeedSpec::new(49, r)).unwrap();
        assert!(p.validate().is_ok(), "{p}");
    }
}

#[test]
fn one_level_reflected_sampler_is_brownian() {
    let w: Vec<f64> = warren_replicas(1, None, &[1.0], 1e-3, 10_000, SeedSpec::new(50, 0))
        .unwrap()
        .iter()
        .map(|v| v[0].get(slot(1, 1)))
        .collect();
    let mut g = ChaCha8Rng::seed_from_u64(51);
    let z: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut g)).collect();
    let ks = empirical_ks(&w, &z).unwrap();
    assert!(ks <= 0.03, "{ks}");
}

#[test]
fn ks_matches_quadratic_oracle_on_large_sets() {
    let mut g = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..3 {
        let a: Vec<f64> = (0..1000).map(|_| StandardNormal.sample(&mut g)).collect();
        let b: Vec<f64> = (0..1000)
            .map(|_| 0.2 + Distribution::<f64>::sample(&StandardNormal, &mut g))
            .collect();
        assert_eq!(empirical_ks(&a, &b).unwrap(), quadratic_ks(&a, &b));
    }
}

#[test]
fn moments_of_a_normal_set() {
    let mut g = ChaCha8Rng::seed_from_u64(53);
    let a: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut g)).collect();
    let s = moment_summary(&a).unwrap();
    assert!(s.mean.abs() < 0.02 && (s.variance - 1.0).abs() < 0.02, "{s:?}");
}

#[test]
fn slot_three_three_improves_with_n() {
    let cfg = ConvergenceConfig {
        driver: DriverKind::Poisson { rate: 1.0 },
        n_values: vec![25.0, 100.0, 400.0],
        size: 3,
        times: vec![1.0],
        replicas: 4000,
        seed: 55,
        grid_step: 1e-3,
        initial: None,
    };
    let report = convergence_pipeline(&cfg).unwrap();
    let (ks25, ks400) = (
        report.ks(25.0, 3, 3, 1.0).unwrap(),
        report.ks(400.0, 3, 3, 1.0).unwrap(),
    );
    assert!(ks400 < ks25, "{ks400} vs {ks25}");
}
