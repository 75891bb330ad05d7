//! Two-dimensional modal Gödel logic: algebra, formulas, Kripke semantics,
//! a constraint tableau decision procedure and a finite model oracle.

pub mod algebra;
pub mod formula;
pub mod kripke;
pub mod tableau;
pub mod oracle;
pub mod cli;
