//! Deciding validity with the constraint tableau, printing the derivation.

use kg2::formula::parse;
use kg2::tableau::{prove_with, Logic, ProveOptions, Verdict};

fn main() {
    let opts = ProveOptions {
        trace: true,
        ..ProveOptions::default()
    };
    for text in ["1 -< <>((p -< q) & q)", "[](p & !p) -> []q"] {
        let verdict = prove_with(&parse(text).unwrap(), Logic::KG2, &opts).unwrap();
        println!("== {text}");
        print!("{}", verdict.trace());
        match verdict {
            Verdict::Valid(t) => println!("valid, {} branches closed in {} steps\n", t.closed_branches, t.steps),
            Verdict::Invalid { world, .. } => println!("invalid, falsified at {world}\n"),
        }
    }
}
