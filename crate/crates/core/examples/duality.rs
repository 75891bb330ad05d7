//! The dual transform maps each value (x, y) to (1 - y, 1 - x).

use kg2::formula::parse;
use kg2::kripke::{dual_transform, eval_kg2};
use kg2::oracle::random_crisp_model;

fn main() {
    let m = random_crisp_model(7, 3, &["p", "q"], 6);
    let d = dual_transform(&m);
    for text in ["p -> q", "[]p -< <>q", "!(p & []q)"] {
        let phi = parse(text).unwrap();
        for w in m.worlds() {
            let v = eval_kg2(&m, w, &phi).unwrap();
            let dv = eval_kg2(&d, w, &phi).unwrap();
            println!("{text:12} {w}: {v} -> dual model {dv} (expected {})", v.dual());
        }
    }
}
