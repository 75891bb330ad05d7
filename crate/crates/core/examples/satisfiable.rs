//! Satisfiability through validity: `phi` is true somewhere iff
//! `~~(1 -< phi)` can be falsified.

use kg2::cli::satisfiability_probe;
use kg2::formula::{parse, wallet};
use kg2::kripke::eval_kg2;
use kg2::tableau::{prove, Logic, Verdict};

fn main() {
    let mut formulas = vec![wallet()];
    formulas.extend(["p & ~p", "p & !p", "[]p & ~<>p"].map(|t| parse(t).unwrap()));
    for phi in formulas {
        match prove(&satisfiability_probe(&phi), Logic::KG2).unwrap() {
            Verdict::Valid(_) => println!("{phi}: unsatisfiable"),
            Verdict::Invalid { model, world, .. } => println!(
                "{phi}: satisfied at {world} of a {}-world model, value {}",
                model.worlds().len(),
                eval_kg2(&model, &world, &phi).unwrap()
            ),
        }
    }
}
