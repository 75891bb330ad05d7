//! Prover against the brute-force oracle on seeded random formulas.
//! Usage: cargo run --release --example agreement [COUNT]

use std::time::Instant;

use kg2::oracle::{agreement_run, AgreementConfig};

fn main() {
    let count = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let t = Instant::now();
    let report = agreement_run(&AgreementConfig {
        count,
        ..AgreementConfig::default()
    });
    print!("{report}");
    println!("elapsed {:.2?}", t.elapsed());
}
