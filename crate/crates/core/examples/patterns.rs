//! Building, validating and printing Gelfand-Tsetlin patterns.
//!
//! cargo run --example patterns

use interlace::{validate_continuous, validate_discrete, ContinuousPattern, DiscretePattern, PatternError};

fn main() {
    let packed = DiscretePattern::packed(4).unwrap();
    println!("packed pattern, N = 4:\n{packed}\n");

    // levels are listed top to bottom: level 1 first
    let ok = vec![vec![0], vec![-1, 0], vec![-2, -1, 0]];
    println!("{ok:?} -> {:?}", validate_discrete(&ok));

    // x[1][2] = 0 is not strictly below x[1][1] = 0
    let bad = vec![vec![0], vec![0, 1]];
    match validate_discrete(&bad) {
        Err(PatternError::Interlacing(vs)) => {
            for v in vs {
                println!("{bad:?} -> {v}");
            }
        }
        other => println!("{bad:?} -> {other:?}"),
    }

    // weak inequalities in the continuous setting
    let weak = vec![vec![1.5], vec![-3.0, 2.7]];
    println!("{weak:?} -> {:?}", validate_continuous(&weak));
    let touching: ContinuousPattern = "0\n0 0".parse().unwrap();
    println!("touching levels {:?} -> {:?}", touching.as_flat(), touching.validate());

    // the text form round-trips
    let text = packed.to_string();
    let back: DiscretePattern = text.parse().unwrap();
    assert_eq!(back, packed);
}
