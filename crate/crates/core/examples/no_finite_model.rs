//! `~~(p -> <>p) & ~~(p -< <>p)` holds everywhere only on an infinite
//! strictly descending chain, so no small grid model satisfies it.

use kg2::oracle::{find_global_model, finite_unsat_check, phi_leq, GridSpec};

fn main() {
    for (k, d) in [(2, 8), (3, 12), (4, 16)] {
        println!("worlds <= {k}, denominator {d}: no model = {}", finite_unsat_check(k, d).unwrap());
    }
    let spec = GridSpec::new(3, 12, vec!["p".into()]).unwrap();
    let m = find_global_model(&phi_leq(), &spec).unwrap().expect("first conjunct alone is satisfiable");
    println!("first conjunct alone:\n{}", m.to_json_string());
}
