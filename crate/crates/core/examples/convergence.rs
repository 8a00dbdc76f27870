//! Rescaled multilevel dynamics approaching the reflected Brownian limit:
//! per-slot KS distance at t = 1 for growing speed-up n.
//!
//! cargo run --release --example convergence -- [poisson|bernoulli] [replicas]

use interlace::{convergence_pipeline, ConvergenceConfig, DriverKind};

fn main() {
    let mut args = std::env::args().skip(1);
    let driver = match args.next().as_deref() {
        None | Some("poisson") => DriverKind::Poisson { rate: 1.0 },
        Some("bernoulli") => DriverKind::Bernoulli { p: 0.5 },
        Some(other) => panic!("unknown driver {other}"),
    };
    let replicas: usize = args.next().map_or(4000, |s| s.parse().expect("replicas"));

    let cfg = ConvergenceConfig {
        driver,
        n_values: vec![25.0, 100.0, 400.0],
        size: 3,
        times: vec![1.0],
        replicas,
        seed: 11,
        grid_step: 1e-3,
        initial: None,
    };
    let report = convergence_pipeline(&cfg).expect("pipeline");

    print!("slot    ");
    for n in &cfg.n_values {
        print!("  n={n:<6}");
    }
    println!();
    for s in interlace::slots(cfg.size) {
        print!("{s}  ");
        for &n in &cfg.n_values {
            print!("  {:.4}  ", report.ks(n, s.level, s.index, 1.0).unwrap());
        }
        println!();
    }
}
