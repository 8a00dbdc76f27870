//! Multilevel TASEP: the interlacing dynamics driven by rate-1 Poisson
//! clocks. Its leftmost particles form an ordinary exclusion process.
//!
//! cargo run --example tasep -- [levels] [horizon] [seed]

use interlace::{poisson_driver, run_dynamics_recorded, DiscretePattern, LevelIndex, Outcome, SeedSpec};

fn main() {
    let mut args = std::env::args().skip(1);
    let size: usize = args.next().map_or(4, |s| s.parse().expect("levels"));
    let horizon: f64 = args.next().map_or(20.0, |s| s.parse().expect("horizon"));
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed"));

    let start = DiscretePattern::packed(size).unwrap();
    let driver = poisson_driver(size, 1.0, horizon, SeedSpec::new(seed, 0)).unwrap();
    let (traj, records) = run_dynamics_recorded(&start, &driver, horizon).unwrap();

    let (mut pushes, mut blocks) = (0, 0);
    for r in &records {
        for o in &r.outcomes {
            match o {
                Outcome::PushedUp { .. } | Outcome::PushedDown { .. } => pushes += 1,
                Outcome::Blocked { .. } => blocks += 1,
                _ => {}
            }
        }
    }
    println!(
        "{} clock rings, {pushes} pushes, {blocks} blocked jumps",
        driver.events().len()
    );
    println!("final pattern at t = {horizon}:\n{}\n", traj.last());

    println!("leftmost column (an exclusion process, particle 1 leading):");
    for t in [0.0, horizon / 4.0, horizon / 2.0, horizon] {
        let p = traj.state_at(t);
        let column: Vec<i64> = (1..=size).map(|k| p.get(LevelIndex::new(k, 1).unwrap())).collect();
        println!("  t = {t:>6.2}: {column:?}");
    }
}
