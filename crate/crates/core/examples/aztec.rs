//! Bernoulli-driven interlacing dynamics (the discrete-time update behind
//! domino shuffling of the Aztec diamond), rescaled by its central limit
//! normalization.
//!
//! cargo run --example aztec -- [steps] [seed]

use interlace::{bernoulli_driver, preset_scaling, run_dynamics, DiscretePattern, DriverKind, SeedSpec};

fn main() {
    let mut args = std::env::args().skip(1);
    let steps: u64 = args.next().map_or(400, |s| s.parse().expect("steps"));
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed"));
    let size = 5;

    let start = DiscretePattern::packed(size).unwrap();
    let driver = bernoulli_driver(size, 0.5, steps, SeedSpec::new(seed, 0)).unwrap();
    let traj = run_dynamics(&start, &driver, steps as f64).unwrap();
    println!("after {steps} steps:\n{}\n", traj.last());

    // (Y(n t) - n t / 2) / sqrt(n / 4) at t = 1, n = steps
    let preset = preset_scaling(DriverKind::Bernoulli { p: 0.5 }, steps as f64).unwrap();
    let (t, scaled) = preset.rescale_state(steps as f64, traj.last());
    println!("rescaled at t = {t}:");
    for level in scaled.levels() {
        let row: Vec<String> = level.iter().map(|v| format!("{v:+.3}")).collect();
        println!("  {}", row.join(" "));
    }
}
