//! Writing a driving path to CSV, reading it back, and replaying it.
//!
//! cargo run --example driver_csv

use interlace::{ingest_path, run_dynamics, DiscretePattern, DriverKind, SeedSpec};

fn main() {
    let driver = DriverKind::Poisson { rate: 0.5 }
        .generate(2, 4.0, SeedSpec::new(12, 0))
        .unwrap();
    let csv = driver.to_csv();
    print!("{csv}");

    let replay = ingest_path(&csv).unwrap();
    assert_eq!(replay, driver);

    let start = DiscretePattern::packed(2).unwrap();
    let traj = run_dynamics(&start, &replay, replay.horizon()).unwrap();
    println!();
    print!("{}", traj.to_csv(&["replayed from the CSV above".to_string()]));

    // a jump of size 2 is not a unit step
    let broken = csv.replacen(",1\n", ",2\n", 1);
    match ingest_path(&broken) {
        Err(e) => println!("\nbroken file rejected: {e}"),
        Ok(_) => println!("\nno events to break"),
    }
}
