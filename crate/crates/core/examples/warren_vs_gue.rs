//! Fixed-time law of reflected interlacing Brownian motions started at 0
//! against eigenvalues of corners of a GUE matrix.
//!
//! cargo run --release --example warren_vs_gue -- [replicas] [grid_step]

use interlace::{empirical_ks, gue_corners_sample, moment_summary, slots, warren_replicas, LevelIndex, SeedSpec};
use rayon::prelude::*;

fn main() {
    let mut args = std::env::args().skip(1);
    let replicas: usize = args.next().map_or(10_000, |s| s.parse().expect("replicas"));
    let h: f64 = args.next().map_or(1e-3, |s| s.parse().expect("grid step"));
    let size = 3;

    let warren: Vec<_> = warren_replicas(size, None, &[1.0], h, replicas, SeedSpec::new(1, 0))
        .expect("warren")
        .into_iter()
        .map(|mut v| v.pop().unwrap())
        .collect();
    let gue: Vec<_> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| gue_corners_sample(size, 1.0, SeedSpec::new(2, r)).unwrap())
        .collect();

    println!("slot      KS      mean(W)   mean(GUE)");
    for s in slots(size) {
        let a: Vec<f64> = warren.iter().map(|p| p.get(s)).collect();
        let b: Vec<f64> = gue.iter().map(|p| p.get(s)).collect();
        let ks = empirical_ks(&a, &b).unwrap();
        let (ma, mb) = (moment_summary(&a).unwrap(), moment_summary(&b).unwrap());
        println!("{s}  {ks:.4}  {:+.4}   {:+.4}", ma.mean, mb.mean);
    }

    let gap = |p: &interlace::ContinuousPattern| {
        p.get(LevelIndex::new(2, 2).unwrap()) - p.get(LevelIndex::new(2, 1).unwrap())
    };
    let gw: Vec<f64> = warren.iter().map(gap).collect();
    let gg: Vec<f64> = gue.iter().map(gap).collect();
    let target = 4.0 / std::f64::consts::PI.sqrt();
    let (sw, sg) = (moment_summary(&gw).unwrap(), moment_summary(&gg).unwrap());
    println!(
        "level-2 gap: reflected {:.4} (se {:.4}), GUE {:.4}, exact {target:.4}",
        sw.mean,
        (sw.variance / replicas as f64).sqrt(),
        sg.mean
    );
}
