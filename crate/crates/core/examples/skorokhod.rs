//! Reflection of a step path into a moving interval, the condition checker,
//! and the level-by-level reflection that reproduces the block/push dynamics.
//!
//! cargo run --example skorokhod

use interlace::{
    check_prop6, discrete_sk_map, gamma_reflect, run_dynamics, DiscretePattern, DriverKind, PiecewisePath, SeedSpec,
    TimeDependentInterval,
};

fn main() {
    // psi = 0, -1, -2, -1 at times 0, 1, 2, 3, held above l = 0
    let psi = PiecewisePath::new(0.0, vec![(1.0, -1.0), (2.0, -2.0), (3.0, -1.0)], 4.0).unwrap();
    let above_zero = TimeDependentInterval::new(PiecewisePath::constant(0.0), PiecewisePath::constant(f64::INFINITY));
    let phi = gamma_reflect(&above_zero, &psi).unwrap();
    println!(
        "one-sided: {:?}",
        (0..=3).map(|t| phi.value_at(t as f64)).collect::<Vec<_>>()
    );
    println!("  conditions: {:?}", check_prop6(&above_zero, &psi, &phi).unwrap());

    // a two-sided interval [0, 1]
    let rising = PiecewisePath::new(0.0, vec![(1.0, 1.0), (2.0, 2.0)], 3.0).unwrap();
    let unit = TimeDependentInterval::new(PiecewisePath::constant(0.0), PiecewisePath::constant(1.0));
    let phi = gamma_reflect(&unit, &rising).unwrap();
    println!(
        "two-sided: {:?}",
        (0..=2).map(|t| phi.value_at(t as f64)).collect::<Vec<_>>()
    );

    // a bump that the reflection would never produce is rejected
    let flat = PiecewisePath::new(0.0, vec![], 3.0).unwrap();
    let bumped = PiecewisePath::new(0.0, vec![(1.0, 1.0), (2.0, 0.0)], 3.0).unwrap();
    let wide = TimeDependentInterval::new(PiecewisePath::constant(-5.0), PiecewisePath::constant(5.0));
    println!("bumped output: {:?}", check_prop6(&wide, &flat, &bumped).unwrap());

    // composing reflections level by level gives the block/push trajectory
    let start = DiscretePattern::packed(4).unwrap();
    let driver = DriverKind::Lazy { q: 0.4 }
        .generate(4, 200.0, SeedSpec::new(3, 0))
        .unwrap();
    let direct = run_dynamics(&start, &driver, 200.0).unwrap();
    let reflected = discrete_sk_map(&driver, &start).unwrap();
    println!(
        "lazy walk, N = 4, {} updates: reflection == block/push: {}",
        direct.len() - 1,
        direct == reflected
    );
}
