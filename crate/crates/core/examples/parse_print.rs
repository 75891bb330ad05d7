//! Parsing, sugar expansion and minimal-parenthesis printing.

use kg2::formula::{parse, wallet};

fn main() {
    for text in ["p & q | r", "p -> q -> r", "~p", "D(p -> q)", "!<>(p -< []q)", "Dn([]p -> []q) & ~Dn([]q -> []p)"] {
        let phi = parse(text).unwrap();
        println!("{text:40} => {phi}  (size {}, modal depth {})", phi.size(), phi.modal_depth());
    }
    println!("wallet formula: {}", wallet());
    match parse("p & | q") {
        Ok(_) => unreachable!(),
        Err(e) => println!("{e}"),
    }
}
