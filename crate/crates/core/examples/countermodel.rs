//! Countermodel extraction: the open branch for `[]p -> [][]p` becomes a
//! three-world chain, checked against the branch and the formula.

use kg2::formula::parse;
use kg2::kripke::{check_realization, eval_kg2_all};
use kg2::tableau::{prove, Logic, Verdict};

fn main() {
    let phi = parse("[]p -> [][]p").unwrap();
    let Verdict::Invalid { model, branch, world, .. } = prove(&phi, Logic::KG2).unwrap() else {
        unreachable!("transitivity is not valid")
    };
    println!("open branch:\n{branch}");
    println!("model:\n{}", model.to_json_string());
    println!("realizes branch: {}", check_realization(&model, &branch).unwrap());
    for r in eval_kg2_all(&model, &phi).unwrap() {
        println!("{} {}", r.world, r.value);
    }
    println!("falsified at {world}");
}
