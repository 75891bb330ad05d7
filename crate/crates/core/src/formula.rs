//! Formulas over `¬ ∧ ∨ → ⨪ □ ◇` with constants, a text syntax, and the
//! derived connectives (Gödel negation, Baaz delta and its two-valued
//! counterpart, order formulas).
//!
//! Concrete syntax, loosest to tightest:
//!
//! | syntax            | meaning                                  |
//! |-------------------|------------------------------------------|
//! | `a -> b`, `a -< b`| implication, coimplication (right assoc) |
//! | `a \| b`          | disjunction (left assoc)                 |
//! | `a & b`           | conjunction (left assoc)                 |
//! | `!a`              | De Morgan negation                       |
//! | `~a`              | Gödel negation, sugar for `a -> 0`       |
//! | `[]a`, `<>a`      | box, diamond                             |
//! | `D a`, `Dn a`     | delta, two-valued delta (expanded)       |
//! | `0`, `1`, `p`     | constants, variables `[a-z][a-z0-9_]*`   |
//!
//! Sugar is expanded while parsing, so a parsed [`Formula`] only contains
//! the core constructors.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(String),
    Const0,
    Const1,
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Coimp(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Dia(Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("{kind} expects {expected} argument(s), got {got}")]
    Arity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("formula contains {0}, which is not allowed here")]
    Forbidden(&'static str),
}

pub fn var(name: &str) -> Formula {
    Formula::Var(name.to_string())
}

impl Formula {
    pub fn neg(a: Formula) -> Formula {
        Formula::Neg(Box::new(a))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }
    pub fn coimp(a: Formula, b: Formula) -> Formula {
        Formula::Coimp(Box::new(a), Box::new(b))
    }
    pub fn boxed(a: Formula) -> Formula {
        Formula::Box(Box::new(a))
    }
    pub fn dia(a: Formula) -> Formula {
        Formula::Dia(Box::new(a))
    }

    /// Gödel negation `a -> 0`.
    pub fn gneg(a: Formula) -> Formula {
        Formula::imp(a, Formula::Const0)
    }

    /// Baaz delta: `~(1 -< a)`.
    pub fn delta(a: Formula) -> Formula {
        Formula::gneg(Formula::coimp(Formula::Const1, a))
    }

    /// Two-valued delta: `~(1 -< a) & !~~(1 -< a)`.
    pub fn delta_neg(a: Formula) -> Formula {
        let c = Formula::coimp(Formula::Const1, a);
        Formula::and(
            Formula::gneg(c.clone()),
            Formula::neg(Formula::gneg(Formula::gneg(c))),
        )
    }

    /// `a ≤ b` in the truth order, as a formula taking only `(1,0)`/`(0,1)`.
    pub fn leq(a: Formula, b: Formula) -> Formula {
        Formula::delta_neg(Formula::imp(a, b))
    }

    /// `a > b` in the truth order.
    pub fn gt(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::delta_neg(Formula::imp(b.clone(), a.clone())),
            Formula::gneg(Formula::delta_neg(Formula::imp(a, b))),
        )
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Var(_) | Formula::Const0 | Formula::Const1 => vec![],
            Formula::Neg(a) | Formula::Box(a) | Formula::Dia(a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Coimp(a, b) => {
                vec![a, b]
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Box(a) | Formula::Dia(a) => 1 + a.modal_depth(),
            _ => self.children().iter().map(|c| c.modal_depth()).max().unwrap_or(0),
        }
    }

    /// Variable names in order of first occurrence (left to right).
    pub fn variables(&self) -> Vec<String> {
        fn go(f: &Formula, out: &mut Vec<String>) {
            if let Formula::Var(v) = f {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            for c in f.children() {
                go(c, out);
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn contains_neg(&self) -> bool {
        matches!(self, Formula::Neg(_)) || self.children().iter().any(|c| c.contains_neg())
    }

    pub fn contains_coimp(&self) -> bool {
        matches!(self, Formula::Coimp(..)) || self.children().iter().any(|c| c.contains_coimp())
    }

    /// All subterms, children before parents, duplicates removed.
    pub fn subformulas(&self) -> Vec<Formula> {
        FormulaArena::new(self).formulas().cloned().collect()
    }

    /// Replaces every variable `p` with `~~p`. Only defined on the classical
    /// modal language (no `!`, no `-<`).
    pub fn embed_classical(&self) -> Result<Formula, FormulaError> {
        if self.contains_neg() {
            return Err(FormulaError::Forbidden("De Morgan negation"));
        }
        if self.contains_coimp() {
            return Err(FormulaError::Forbidden("coimplication"));
        }
        Ok(self.map_vars(&|v| Formula::gneg(Formula::gneg(var(v)))))
    }

    pub fn map_vars(&self, f: &dyn Fn(&str) -> Formula) -> Formula {
        let m = |a: &Formula| Box::new(a.map_vars(f));
        match self {
            Formula::Var(v) => f(v),
            Formula::Const0 => Formula::Const0,
            Formula::Const1 => Formula::Const1,
            Formula::Neg(a) => Formula::Neg(m(a)),
            Formula::And(a, b) => Formula::And(m(a), m(b)),
            Formula::Or(a, b) => Formula::Or(m(a), m(b)),
            Formula::Imp(a, b) => Formula::Imp(m(a), m(b)),
            Formula::Coimp(a, b) => Formula::Coimp(m(a), m(b)),
            Formula::Box(a) => Formula::Box(m(a)),
            Formula::Dia(a) => Formula::Dia(m(a)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivedKind {
    Bot,
    Top,
    Gneg,
    Delta,
    DeltaNeg,
    Leq,
    Gt,
}

impl DerivedKind {
    fn name(self) -> &'static str {
        match self {
            DerivedKind::Bot => "bot",
            DerivedKind::Top => "top",
            DerivedKind::Gneg => "gneg",
            DerivedKind::Delta => "delta",
            DerivedKind::DeltaNeg => "delta_neg",
            DerivedKind::Leq => "leq",
            DerivedKind::Gt => "gt",
        }
    }
}

pub fn derived(kind: DerivedKind, args: &[Formula]) -> Result<Formula, FormulaError> {
    let expected = match kind {
        DerivedKind::Bot | DerivedKind::Top => 0,
        DerivedKind::Gneg | DerivedKind::Delta | DerivedKind::DeltaNeg => 1,
        DerivedKind::Leq | DerivedKind::Gt => 2,
    };
    if args.len() != expected {
        return Err(FormulaError::Arity {
            kind: kind.name(),
            expected,
            got: args.len(),
        });
    }
    let a = || args[0].clone();
    let b = || args[1].clone();
    Ok(match kind {
        DerivedKind::Bot => Formula::Const0,
        DerivedKind::Top => Formula::Const1,
        DerivedKind::Gneg => Formula::gneg(a()),
        DerivedKind::Delta => Formula::delta(a()),
        DerivedKind::DeltaNeg => Formula::delta_neg(a()),
        DerivedKind::Leq => Formula::leq(a(), b()),
        DerivedKind::Gt => Formula::gt(a(), b()),
    })
}

/// The wallet formula `Dn([]p -> []q) & ~Dn([]q -> []p)`, which is
/// `gt([]q, []p)`: it takes `(1,0)` exactly where `[]q` is strictly above `[]p`.
pub fn wallet() -> Formula {
    Formula::gt(Formula::boxed(var("q")), Formula::boxed(var("p")))
}

// ---------------------------------------------------------------------------
// Interning
// ---------------------------------------------------------------------------

/// Index of a subformula inside a [`FormulaArena`].
pub type FId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Var(u32),
    Const0,
    Const1,
    Neg(FId),
    And(FId, FId),
    Or(FId, FId),
    Imp(FId, FId),
    Coimp(FId, FId),
    Box(FId),
    Dia(FId),
}

/// The distinct subformulas of a root formula, numbered so that children
/// always precede their parents. The root is the last entry.
#[derive(Debug, Clone)]
pub struct FormulaArena {
    nodes: Vec<Node>,
    formulas: Vec<Formula>,
    index: HashMap<Formula, FId>,
    vars: Vec<String>,
}

impl FormulaArena {
    pub fn new(root: &Formula) -> Self {
        let mut arena = FormulaArena {
            nodes: Vec::new(),
            formulas: Vec::new(),
            index: HashMap::new(),
            vars: Vec::new(),
        };
        arena.intern(root);
        arena
    }

    fn intern(&mut self, f: &Formula) -> FId {
        if let Some(&id) = self.index.get(f) {
            return id;
        }
        let node = match f {
            Formula::Var(v) => {
                let i = match self.vars.iter().position(|x| x == v) {
                    Some(i) => i,
                    None => {
                        self.vars.push(v.clone());
                        self.vars.len() - 1
                    }
                };
                Node::Var(i as u32)
            }
            Formula::Const0 => Node::Const0,
            Formula::Const1 => Node::Const1,
            Formula::Neg(a) => Node::Neg(self.intern(a)),
            Formula::And(a, b) => {
                let (x, y) = (self.intern(a), self.intern(b));
                Node::And(x, y)
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.intern(a), self.intern(b));
                Node::Or(x, y)
            }
            Formula::Imp(a, b) => {
                let (x, y) = (self.intern(a), self.intern(b));
                Node::Imp(x, y)
            }
            Formula::Coimp(a, b) => {
                let (x, y) = (self.intern(a), self.intern(b));
                Node::Coimp(x, y)
            }
            Formula::Box(a) => Node::Box(self.intern(a)),
            Formula::Dia(a) => Node::Dia(self.intern(a)),
        };
        let id = self.nodes.len() as FId;
        self.nodes.push(node);
        self.formulas.push(f.clone());
        self.index.insert(f.clone(), id);
        id
    }

    pub fn root(&self) -> FId {
        (self.nodes.len() - 1) as FId
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: FId) -> Node {
        self.nodes[id as usize]
    }

    pub fn formula(&self, id: FId) -> &Formula {
        &self.formulas[id as usize]
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.formulas.iter()
    }

    pub fn id_of(&self, f: &Formula) -> Option<FId> {
        self.index.get(f).copied()
    }

    /// Variable names in order of first interning.
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// `(var index, component)` pairs that the positive value of the root can
    /// depend on. Component `false` is the support of truth, `true` the
    /// support of falsity; each `!` on the path flips it.
    pub fn relevant_slots(&self) -> Vec<(u32, bool)> {
        let mut seen: BTreeSet<(FId, bool)> = BTreeSet::new();
        let mut stack = vec![(self.root(), false)];
        let mut slots = BTreeSet::new();
        while let Some((id, flip)) = stack.pop() {
            if !seen.insert((id, flip)) {
                continue;
            }
            match self.node(id) {
                Node::Var(v) => {
                    slots.insert((v, flip));
                }
                Node::Const0 | Node::Const1 => {}
                Node::Neg(a) => stack.push((a, !flip)),
                Node::Box(a) | Node::Dia(a) => stack.push((a, flip)),
                Node::And(a, b) | Node::Or(a, b) | Node::Imp(a, b) | Node::Coimp(a, b) => {
                    stack.push((a, flip));
                    stack.push((b, flip));
                }
            }
        }
        slots.into_iter().collect()
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    One,
    Not,
    Tilde,
    BoxOp,
    DiaOp,
    Delta,
    DeltaNeg,
    And,
    Or,
    Arrow,
    Coarrow,
    LParen,
    RParen,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("variable `{s}`"),
        Tok::Zero => "`0`".into(),
        Tok::One => "`1`".into(),
        Tok::Not => "`!`".into(),
        Tok::Tilde => "`~`".into(),
        Tok::BoxOp => "`[]`".into(),
        Tok::DiaOp => "`<>`".into(),
        Tok::Delta => "`D`".into(),
        Tok::DeltaNeg => "`Dn`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Coarrow => "`-<`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |i: usize, m: String| ParseError {
        position: i,
        message: m,
    };
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '&' => Tok::And,
            '|' => Tok::Or,
            '!' => Tok::Not,
            '~' => Tok::Tilde,
            '0' => Tok::Zero,
            '1' => Tok::One,
            '[' if next == Some(']') => {
                i += 1;
                Tok::BoxOp
            }
            '<' if next == Some('>') => {
                i += 1;
                Tok::DiaOp
            }
            '-' if next == Some('>') => {
                i += 1;
                Tok::Arrow
            }
            '-' if next == Some('<') => {
                i += 1;
                Tok::Coarrow
            }
            'D' if next == Some('n') => {
                i += 1;
                Tok::DeltaNeg
            }
            'D' => Tok::Delta,
            c if c.is_ascii_lowercase() => {
                let mut j = i + 1;
                while j < chars.len()
                    && (chars[j].is_ascii_lowercase() || chars[j].is_ascii_digit() || chars[j] == '_')
                {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                i = j;
                out.push((start, Tok::Ident(name)));
                continue;
            }
            other => return Err(err(i, format!("unexpected character {other:?}"))),
        };
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn error<T>(&self, what: &str) -> Result<T, ParseError> {
        let found = match self.peek() {
            Some(t) => describe(t),
            None => "end of input".to_string(),
        };
        Err(ParseError {
            position: self.offset(),
            message: format!("expected {what}, found {found}"),
        })
    }

    // arrow := disj (('->' | '-<') arrow)?
    fn arrow(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        match self.peek() {
            Some(Tok::Arrow) => {
                self.pos += 1;
                Ok(Formula::imp(lhs, self.arrow()?))
            }
            Some(Tok::Coarrow) => {
                self.pos += 1;
                Ok(Formula::coimp(lhs, self.arrow()?))
            }
            _ => Ok(lhs),
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            lhs = Formula::or(lhs, self.conj()?);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.prefix()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            lhs = Formula::and(lhs, self.prefix()?);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Formula, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return self.error("a formula");
        };
        let unary = |p: &mut Parser, f: fn(Formula) -> Formula| {
            p.pos += 1;
            p.prefix().map(f)
        };
        match tok {
            Tok::Not => unary(self, Formula::neg),
            Tok::Tilde => unary(self, Formula::gneg),
            Tok::BoxOp => unary(self, Formula::boxed),
            Tok::DiaOp => unary(self, Formula::dia),
            Tok::Delta => unary(self, Formula::delta),
            Tok::DeltaNeg => unary(self, Formula::delta_neg),
            Tok::Zero => {
                self.pos += 1;
                Ok(Formula::Const0)
            }
            Tok::One => {
                self.pos += 1;
                Ok(Formula::Const1)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                Ok(Formula::Var(name))
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.arrow()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.error("`)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => self.error("a formula"),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
    };
    let f = p.arrow()?;
    if p.pos < p.toks.len() {
        return p.error("end of input");
    }
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

// Precedence levels: 1 arrows, 2 `|`, 3 `&`, 4 prefix and atoms.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Imp(..) | Formula::Coimp(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut String) {
    if prec(f) < min {
        out.push('(');
        write_at(f, 0, out);
        out.push(')');
        return;
    }
    match f {
        Formula::Var(v) => out.push_str(v),
        Formula::Const0 => out.push('0'),
        Formula::Const1 => out.push('1'),
        Formula::Neg(a) => {
            out.push('!');
            write_at(a, 4, out);
        }
        Formula::Box(a) => {
            out.push_str("[]");
            write_at(a, 4, out);
        }
        Formula::Dia(a) => {
            out.push_str("<>");
            write_at(a, 4, out);
        }
        Formula::And(a, b) => {
            write_at(a, 3, out);
            out.push_str(" & ");
            write_at(b, 4, out);
        }
        Formula::Or(a, b) => {
            write_at(a, 2, out);
            out.push_str(" | ");
            write_at(b, 3, out);
        }
        Formula::Imp(a, b) | Formula::Coimp(a, b) => {
            write_at(a, 2, out);
            out.push_str(if matches!(f, Formula::Imp(..)) { " -> " } else { " -< " });
            write_at(b, 1, out);
        }
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_at(f, 0, &mut s);
    s
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", print_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> Formula {
        var("p")
    }
    fn q() -> Formula {
        var("q")
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse("1 -< <>((p -< q) & q)").unwrap(),
            Formula::coimp(
                Formula::Const1,
                Formula::dia(Formula::and(Formula::coimp(p(), q()), q()))
            )
        );
        assert_eq!(
            parse("[]p -> [][]p").unwrap(),
            Formula::imp(Formula::boxed(p()), Formula::boxed(Formula::boxed(p())))
        );
        assert_eq!(parse("~p").unwrap(), Formula::imp(p(), Formula::Const0));
        let e = parse("p & | q").unwrap_err();
        assert_eq!(e.position, 4);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse("p -> q -> r").unwrap(),
            Formula::imp(p(), Formula::imp(q(), var("r")))
        );
        assert_eq!(
            parse("p -< q -> r").unwrap(),
            Formula::coimp(p(), Formula::imp(q(), var("r")))
        );
        assert_eq!(
            parse("p & q | r").unwrap(),
            Formula::or(Formula::and(p(), q()), var("r"))
        );
        assert_eq!(
            parse("p | q & r -> s").unwrap(),
            Formula::imp(Formula::or(p(), Formula::and(q(), var("r"))), var("s"))
        );
        assert_eq!(
            parse("!p & []q").unwrap(),
            Formula::and(Formula::neg(p()), Formula::boxed(q()))
        );
        assert_eq!(parse("p & q & r").unwrap(), Formula::and(Formula::and(p(), q()), var("r")));
    }

    #[test]
    fn parse_errors() {
        for (text, pos) in [("", 0), ("(p", 2), ("p q", 2), ("p $ q", 2), ("[p", 0), ("p ->", 4), ("P", 0)] {
            let e = parse(text).unwrap_err();
            assert_eq!(e.position, pos, "{text:?}: {e}");
        }
    }

    #[test]
    fn sugar_expansion() {
        assert_eq!(parse("D p").unwrap(), Formula::delta(p()));
        assert_eq!(parse("Dn p").unwrap(), Formula::delta_neg(p()));
        assert_eq!(parse("Dn(p -> q)").unwrap(), Formula::leq(p(), q()));
        assert_eq!(
            parse("Dn([]p -> []q) & ~Dn([]q -> []p)").unwrap(),
            wallet()
        );
        assert_eq!(
            wallet(),
            Formula::and(
                Formula::delta_neg(Formula::imp(Formula::boxed(p()), Formula::boxed(q()))),
                Formula::gneg(Formula::delta_neg(Formula::imp(Formula::boxed(q()), Formula::boxed(p()))))
            )
        );
    }

    #[test]
    fn derived_constructors() {
        let bp = Formula::boxed(p());
        let bq = Formula::boxed(q());
        let g = derived(DerivedKind::Gt, &[bp.clone(), bq.clone()]).unwrap();
        assert_eq!(
            g,
            Formula::and(
                Formula::delta_neg(Formula::imp(bq.clone(), bp.clone())),
                Formula::gneg(Formula::delta_neg(Formula::imp(bp, bq)))
            )
        );
        assert_eq!(derived(DerivedKind::Bot, &[]).unwrap(), Formula::Const0);
        assert_eq!(derived(DerivedKind::Top, &[]).unwrap(), Formula::Const1);
        assert!(matches!(
            derived(DerivedKind::Delta, &[p(), q()]),
            Err(FormulaError::Arity { .. })
        ));
        assert!(derived(DerivedKind::Leq, &[p()]).is_err());
    }

    #[test]
    fn print_examples() {
        assert_eq!(
            print_formula(&Formula::imp(Formula::boxed(p()), Formula::boxed(Formula::boxed(p())))),
            "[]p -> [][]p"
        );
        assert_eq!(print_formula(&Formula::and(Formula::coimp(p(), q()), q())), "(p -< q) & q");
        assert_eq!(print_formula(&Formula::Const1), "1");
        assert_eq!(
            print_formula(&Formula::imp(Formula::imp(p(), q()), var("r"))),
            "(p -> q) -> r"
        );
        assert_eq!(print_formula(&Formula::and(p(), Formula::and(q(), var("r")))), "p & (q & r)");
        assert_eq!(print_formula(&Formula::neg(Formula::or(p(), q()))), "!(p | q)");
    }

    #[test]
    fn subformula_examples() {
        assert_eq!(p().subformulas(), vec![p()]);
        assert_eq!(
            Formula::imp(p(), q()).subformulas(),
            vec![p(), q(), Formula::imp(p(), q())]
        );
        let bb = Formula::boxed(Formula::boxed(p()));
        assert_eq!(bb.subformulas(), vec![p(), Formula::boxed(p()), bb.clone()]);
        assert_eq!(Formula::and(p(), p()).subformulas().len(), 2);
    }

    #[test]
    fn modal_depth_examples() {
        assert_eq!(parse("p & q").unwrap().modal_depth(), 0);
        assert_eq!(parse("[]p -> [][]p").unwrap().modal_depth(), 2);
        assert_eq!(parse("<>((p -< q) & q)").unwrap().modal_depth(), 1);
    }

    #[test]
    fn embedding() {
        let nn = |f: Formula| Formula::gneg(Formula::gneg(f));
        assert_eq!(p().embed_classical().unwrap(), nn(p()));
        assert_eq!(
            parse("p | ~p").unwrap().embed_classical().unwrap(),
            Formula::or(nn(p()), Formula::gneg(nn(p())))
        );
        assert_eq!(
            parse("[](p -> p)").unwrap().embed_classical().unwrap(),
            Formula::boxed(Formula::imp(nn(p()), nn(p())))
        );
        assert!(parse("!p").unwrap().embed_classical().is_err());
        assert!(parse("p -< q").unwrap().embed_classical().is_err());
    }

    #[test]
    fn relevant_slots_follow_negation_parity() {
        let f = parse("!p & (q -> !!r)").unwrap();
        let a = FormulaArena::new(&f);
        let names: Vec<(String, bool)> = a
            .relevant_slots()
            .into_iter()
            .map(|(v, c)| (a.vars()[v as usize].clone(), c))
            .collect();
        assert!(names.contains(&("p".into(), true)));
        assert!(names.contains(&("q".into(), false)));
        assert!(names.contains(&("r".into(), false)));
        assert_eq!(names.len(), 3);
    }

    pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["p", "q", "r", "x1", "long_name"]).prop_map(var),
            Just(Formula::Const0),
            Just(Formula::Const1),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::neg),
                inner.clone().prop_map(Formula::boxed),
                inner.clone().prop_map(Formula::dia),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::coimp(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb_formula()) {
            let text = print_formula(&f);
            prop_assert_eq!(parse(&text).unwrap(), f);
        }

        #[test]
        fn subformulas_bounded_by_size(f in arb_formula()) {
            let subs = f.subformulas();
            prop_assert!(subs.len() <= f.size());
            prop_assert_eq!(subs.last().unwrap(), &f);
        }
    }
}
