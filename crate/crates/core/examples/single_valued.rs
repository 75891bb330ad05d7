//! The single-valued logic: prover mode and evaluation on fuzzy frames.

use kg2::formula::parse;
use kg2::kripke::{eval_kbig_all, parse_model};
use kg2::tableau::{prove, Logic};

fn main() {
    for text in ["D(p -> q) | D(q -> p)", "[](p -> q) -> ([]p -> []q)", "<>(p | q) -> <>p | <>q"] {
        let phi = parse(text).unwrap();
        let one = prove(&phi, Logic::KbiG).unwrap().is_valid();
        let two = prove(&phi, Logic::KG2).unwrap().is_valid();
        println!("{text:32} single-valued {one:5}  two-valued {two}");
    }

    let m = parse_model(
        r#"{"worlds":["a","b","c"],
            "fuzzy_relation":[["a","b","1/2"],["a","c","1"],["b","c","1/3"]],
            "valuation":{"a":{"p":"1/5"},"b":{"p":"3/4","q":"1/2"},"c":{"p":"1/3","q":"1"}}}"#,
    )
    .unwrap();
    for text in ["[]p", "<>p", "1 -< <>((p -< q) & q)"] {
        let values = eval_kbig_all(&m, &parse(text).unwrap()).unwrap();
        println!("{text:24} {values:?}");
    }
}
