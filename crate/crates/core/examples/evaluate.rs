//! Two-valued evaluation on a crisp model given as JSON.

use kg2::formula::parse;
use kg2::kripke::{eval_kg2_all, is_valid_on_model, parse_model};

const MODEL: &str = r#"{
  "worlds": ["a", "b", "c"],
  "relation": [["a", "b"], ["a", "c"]],
  "valuation": {
    "a": {"p": "1"},
    "b": {"p": ["1/2", "1/4"], "q": "1"},
    "c": {"p": ["1", "1"], "q": "1/3"}
  }
}"#;

fn main() {
    let m = parse_model(MODEL).unwrap();
    for text in ["[]p", "<>p", "!<>p", "<>(p & !p)", "[](p -> q)", "[]p -> p"] {
        let phi = parse(text).unwrap();
        print!("{text:12}");
        for r in eval_kg2_all(&m, &phi).unwrap() {
            print!("  {}={}", r.world, r.value);
        }
        println!("  valid: {}", is_valid_on_model(&m, &phi).unwrap());
    }
}
