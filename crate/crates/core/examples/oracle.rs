//! Brute-force search for small countermodels on a finite value grid.

use kg2::formula::parse;
use kg2::oracle::{enumerate_models, oracle_search, GridSpec, SearchOutcome};

fn main() {
    let spec = GridSpec::new(1, 2, vec!["p".into()]).unwrap();
    println!("one world, one variable, values in {{0, 1/2, 1}}: {} models", enumerate_models(&spec).len());

    for text in ["(p & !p) -> q", "p -> p", "[]p -> [][]p", "1 -< <>((p -< q) & q)"] {
        let phi = parse(text).unwrap();
        let spec = GridSpec::for_formula(&phi, 3).unwrap();
        match oracle_search(&phi, &spec).unwrap() {
            SearchOutcome::Countermodel { model, world } => {
                println!("{text}: countermodel with {} worlds, falsified at {world}", model.worlds().len())
            }
            other => println!("{text}: {other:?}"),
        }
    }
}
