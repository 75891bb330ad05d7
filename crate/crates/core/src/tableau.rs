//! Constraint tableaux over structures `w:i:φ` (the value of `φ` at world
//! `w` in component `i`, 1 = support of truth, 2 = support of falsity) and
//! the constants 0 and 1.
//!
//! A proof of `φ` is a closed tableau for `w0:1:φ < 1`. Branches are explored
//! depth first; a branch closes when its constraints force `X < X` for some
//! structure, which is detected on an order graph with built-in edges
//! `0 ≤ s ≤ 1` and `0 < 1`.
//!
//! Fresh-world rules on a weak premise carry an extra column for the case of
//! a world without successors (`□φ = 1`, `◇φ = 0` there). Without it the
//! calculus would prove formulas that fail at dead ends, such as
//! `<>1 | ~(q -> <>p)`.
//!
//! One witness world is created per `(world, component, modal formula)` and
//! shared by every premise that asks for it; a minimizing (maximizing)
//! successor witnesses all of them at once.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use thiserror::Error;

use crate::algebra::{PairValue, UnitValue};
use crate::formula::{print_formula, FId, Formula, FormulaArena, Node};
use crate::kripke::{check_realization, eval_kg2, KripkeError, KripkeModel};

pub type World = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Structure {
    Zero,
    One,
    Lab { world: World, index: u8, f: FId },
}

/// `lhs < rhs` when `strict`, else `lhs ≤ rhs`. Constraints written with
/// `≥`/`>` are stored flipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub lhs: Structure,
    pub strict: bool,
    pub rhs: Structure,
}

impl Constraint {
    pub fn le(lhs: Structure, rhs: Structure) -> Self {
        Constraint { lhs, strict: false, rhs }
    }
    pub fn lt(lhs: Structure, rhs: Structure) -> Self {
        Constraint { lhs, strict: true, rhs }
    }
    fn new(lhs: Structure, rhs: Structure, strict: bool) -> Self {
        Constraint { lhs, strict, rhs }
    }
    /// Holds in every model: `S ≤ 1`, `0 ≤ S`, `S ≤ S`.
    pub fn is_trivial(&self) -> bool {
        !self.strict && (self.rhs == Structure::One || self.lhs == Structure::Zero || self.lhs == self.rhs)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableauError {
    #[error("resource limit reached: more than {limit} {resource}")]
    ResourceExhausted { resource: &'static str, limit: usize },
    #[error("rule instance is not applicable to this branch")]
    NotApplicable,
    #[error("branch is closed")]
    BranchClosed,
    #[error("countermodel extraction failed: {0}")]
    ExtractionFailed(String),
    #[error("the single-valued logic has no De Morgan negation")]
    NegationInKbig,
    #[error(transparent)]
    Kripke(#[from] KripkeError),
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Conn {
    Neg,
    And,
    Or,
    Imp,
    Coimp,
    Box,
    Dia,
}

impl Conn {
    fn symbol(self) -> &'static str {
        match self {
            Conn::Neg => "¬",
            Conn::And => "∧",
            Conn::Or => "∨",
            Conn::Imp => "→",
            Conn::Coimp => "⨪",
            Conn::Box => "□",
            Conn::Dia => "◇",
        }
    }
}

/// Which side of the premise the decomposed structure sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    /// `S ≲ X`
    Le,
    /// `S ≳ X`, stored as `X ≲ S`
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId {
    pub conn: Conn,
    pub index: u8,
    pub dir: Dir,
    /// `None`: the schema covers both `<` and `≤` (resp. `>` and `≥`).
    pub strict: Option<bool>,
}

impl RuleId {
    pub fn name(&self) -> String {
        let rel = match (self.dir, self.strict) {
            (Dir::Le, None) => "≲",
            (Dir::Ge, None) => "≳",
            (Dir::Le, Some(false)) => "≤",
            (Dir::Le, Some(true)) => "<",
            (Dir::Ge, Some(false)) => "≥",
            (Dir::Ge, Some(true)) => ">",
        };
        format!("{}{}{}", self.conn.symbol(), self.index, rel)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Application priority, lowest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleClass {
    NonBranching,
    Branching,
    Fresh,
    Propagation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Neg,
    /// value is a meet: `∧` in component 1, `∨` in component 2
    Min,
    Max,
    /// value is an implication `ant → cons`
    Imp { swapped: bool },
    /// value is a coimplication `min ⨪ sub`
    Coimp { swapped: bool },
    ModalMin,
    ModalMax,
}

fn family(conn: Conn, index: u8) -> Family {
    let first = index == 1;
    match conn {
        Conn::Neg => Family::Neg,
        Conn::And if first => Family::Min,
        Conn::Or if !first => Family::Min,
        Conn::And | Conn::Or => Family::Max,
        Conn::Imp if first => Family::Imp { swapped: false },
        Conn::Coimp if !first => Family::Imp { swapped: true },
        Conn::Coimp => Family::Coimp { swapped: false },
        Conn::Imp => Family::Coimp { swapped: true },
        Conn::Box if first => Family::ModalMin,
        Conn::Dia if !first => Family::ModalMin,
        Conn::Box | Conn::Dia => Family::ModalMax,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSchema {
    pub id: RuleId,
    pub class: RuleClass,
}

impl RuleSchema {
    pub fn fresh_world(&self) -> bool {
        self.class == RuleClass::Fresh
    }
}

#[derive(Debug, Clone)]
pub struct RuleTable {
    rules: Vec<RuleSchema>,
}

fn schemata_for(conn: Conn, index: u8) -> Vec<RuleSchema> {
    use RuleClass::*;
    let mk = |dir, strict, class| RuleSchema {
        id: RuleId {
            conn,
            index,
            dir,
            strict,
        },
        class,
    };
    match family(conn, index) {
        Family::Neg => vec![mk(Dir::Le, None, NonBranching), mk(Dir::Ge, None, NonBranching)],
        Family::Min => vec![mk(Dir::Le, None, Branching), mk(Dir::Ge, None, NonBranching)],
        Family::Max => vec![mk(Dir::Le, None, NonBranching), mk(Dir::Ge, None, Branching)],
        Family::Imp { .. } => vec![
            mk(Dir::Le, Some(false), Branching),
            mk(Dir::Le, Some(true), NonBranching),
            mk(Dir::Ge, None, Branching),
        ],
        Family::Coimp { .. } => vec![
            mk(Dir::Le, None, Branching),
            mk(Dir::Ge, Some(false), Branching),
            mk(Dir::Ge, Some(true), NonBranching),
        ],
        Family::ModalMin => vec![mk(Dir::Le, None, Fresh), mk(Dir::Ge, None, Propagation)],
        Family::ModalMax => vec![mk(Dir::Le, None, Propagation), mk(Dir::Ge, None, Fresh)],
    }
}

impl RuleTable {
    /// All 32 schemata.
    pub fn kg2() -> Self {
        Self::build(&[1, 2])
    }

    /// Only the rules for the support of truth.
    pub fn kbig() -> Self {
        Self::build(&[1])
    }

    fn build(indices: &[u8]) -> Self {
        let conns = [Conn::Neg, Conn::And, Conn::Or, Conn::Imp, Conn::Coimp, Conn::Box, Conn::Dia];
        let mut rules = Vec::new();
        for &index in indices {
            for conn in conns {
                rules.extend(schemata_for(conn, index));
            }
        }
        RuleTable { rules }
    }

    pub fn schemata(&self) -> &[RuleSchema] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn lookup(&self, conn: Conn, index: u8, dir: Dir, strict: bool) -> Option<&RuleSchema> {
        self.rules.iter().find(|r| {
            r.id.conn == conn && r.id.index == index && r.id.dir == dir && r.id.strict.map_or(true, |s| s == strict)
        })
    }
}

fn conn_of(node: Node) -> Option<Conn> {
    Some(match node {
        Node::Neg(_) => Conn::Neg,
        Node::And(..) => Conn::And,
        Node::Or(..) => Conn::Or,
        Node::Imp(..) => Conn::Imp,
        Node::Coimp(..) => Conn::Coimp,
        Node::Box(_) => Conn::Box,
        Node::Dia(_) => Conn::Dia,
        Node::Var(_) | Node::Const0 | Node::Const1 => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Instance {
    pub rule: RuleId,
    pub class: RuleClass,
    pub constraint: Constraint,
    /// The `wRw'` premise of a propagation rule.
    pub relation: Option<(World, World)>,
}

/// An entry a rule conclusion adds to a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Item {
    Constraint(Constraint),
    Relation(World, World),
}

// ---------------------------------------------------------------------------
// Order graph
// ---------------------------------------------------------------------------

/// Structures of a branch with `≤`/`<` edges, including the bound edges.
#[derive(Debug, Clone)]
pub struct OrderGraph {
    index: HashMap<Structure, usize>,
    nodes: Vec<Structure>,
    out: Vec<Vec<(usize, bool)>>,
}

impl Default for OrderGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl OrderGraph {
    pub fn new() -> Self {
        let mut index = HashMap::new();
        index.insert(Structure::Zero, 0);
        index.insert(Structure::One, 1);
        OrderGraph {
            index,
            nodes: vec![Structure::Zero, Structure::One],
            out: vec![vec![(1, true)], vec![]],
        }
    }

    fn node(&mut self, s: Structure) -> usize {
        if let Some(&i) = self.index.get(&s) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(s);
        self.index.insert(s, i);
        self.out.push(vec![(1, false)]);
        self.out[0].push((i, false));
        i
    }

    /// Adds `a ≲ b`. Returns true when this creates a cycle through a strict
    /// edge.
    pub fn add(&mut self, a: Structure, b: Structure, strict: bool) -> bool {
        let (ia, ib) = (self.node(a), self.node(b));
        if ia == ib {
            return strict;
        }
        let closes = self.reaches(ib, ia, strict);
        self.out[ia].push((ib, strict));
        closes
    }

    /// Is there a path `from ⇝ to` that, together with `strict`, contains a
    /// strict edge?
    fn reaches(&self, from: usize, to: usize, strict: bool) -> bool {
        let mut seen = vec![[false; 2]; self.nodes.len()];
        let mut queue = VecDeque::from([(from, strict)]);
        seen[from][strict as usize] = true;
        while let Some((n, s)) = queue.pop_front() {
            if n == to && s {
                return true;
            }
            for &(m, e) in &self.out[n] {
                let t = s || e;
                if !seen[m][t as usize] && !(seen[m][1] && !t) {
                    seen[m][t as usize] = true;
                    queue.push_back((m, t));
                }
            }
        }
        false
    }

    pub fn nodes(&self) -> &[Structure] {
        &self.nodes
    }

    /// `(from, to, strict)` triples, bound edges included.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(a, v)| v.iter().map(move |&(b, s)| (a, b, s)))
    }
}

// ---------------------------------------------------------------------------
// Branches
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Fired {
    rule: RuleId,
    constraint: Constraint,
    relation: Option<(World, World)>,
}

#[derive(Debug, Clone)]
pub struct Branch {
    arena: Arc<FormulaArena>,
    constraints: Vec<Constraint>,
    constraint_set: HashSet<Constraint>,
    relations: Vec<(World, World)>,
    relation_set: HashSet<(World, World)>,
    fired: HashSet<Fired>,
    worlds: u32,
    witnesses: HashMap<(World, u8, FId), World>,
    graph: OrderGraph,
    closed: bool,
}

impl Branch {
    /// A branch with no entries whose structures range over the
    /// subformulas of `root`, and one world `w0`.
    pub fn empty(root: &Formula) -> Self {
        Branch {
            arena: Arc::new(FormulaArena::new(root)),
            constraints: Vec::new(),
            constraint_set: HashSet::new(),
            relations: Vec::new(),
            relation_set: HashSet::new(),
            fired: HashSet::new(),
            worlds: 1,
            witnesses: HashMap::new(),
            graph: OrderGraph::new(),
            closed: false,
        }
    }

    pub fn world_name(w: World) -> String {
        format!("w{w}")
    }

    pub fn arena(&self) -> &FormulaArena {
        &self.arena
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn relations(&self) -> &[(World, World)] {
        &self.relations
    }

    pub fn world_count(&self) -> usize {
        self.worlds as usize
    }

    pub fn fired_count(&self) -> usize {
        self.fired.len()
    }

    pub fn graph(&self) -> &OrderGraph {
        &self.graph
    }

    /// True once a strict cycle has been added.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// `w:i:φ`, with labelled constants replaced by the plain constant
    /// they denote.
    pub fn lab(&self, world: World, index: u8, f: FId) -> Structure {
        match (self.arena.node(f), index) {
            (Node::Const1, 1) | (Node::Const0, 2) => Structure::One,
            (Node::Const0, 1) | (Node::Const1, 2) => Structure::Zero,
            _ => Structure::Lab { world, index, f },
        }
    }

    /// Structure for a subformula given by value, if it is one.
    pub fn structure(&self, world: World, index: u8, phi: &Formula) -> Option<Structure> {
        self.arena.id_of(phi).map(|f| self.lab(world, index, f))
    }

    /// Declares worlds `w0..w{n-1}`.
    pub fn ensure_worlds(&mut self, n: u32) {
        self.worlds = self.worlds.max(n);
    }

    pub fn push_constraint(&mut self, c: Constraint) {
        if !self.constraint_set.insert(c) {
            return;
        }
        for s in [c.lhs, c.rhs] {
            if let Structure::Lab { world, .. } = s {
                self.ensure_worlds(world + 1);
            }
        }
        self.constraints.push(c);
        if self.graph.add(c.lhs, c.rhs, c.strict) {
            self.closed = true;
        }
    }

    pub fn push_relation(&mut self, a: World, b: World) {
        if self.relation_set.insert((a, b)) {
            self.ensure_worlds(a.max(b) + 1);
            self.relations.push((a, b));
        }
    }

    fn push_item(&mut self, item: Item) {
        match item {
            Item::Constraint(c) => self.push_constraint(c),
            Item::Relation(a, b) => self.push_relation(a, b),
        }
    }

    pub fn fmt_structure(&self, s: &Structure) -> String {
        match *s {
            Structure::Zero => "0".into(),
            Structure::One => "1".into(),
            Structure::Lab { world, index, f } => {
                let phi = self.arena.formula(f);
                let text = print_formula(phi);
                if phi.children().is_empty() || matches!(phi, Formula::Neg(_) | Formula::Box(_) | Formula::Dia(_)) {
                    format!("w{world}:{index}:{text}")
                } else {
                    format!("w{world}:{index}:({text})")
                }
            }
        }
    }

    pub fn fmt_constraint(&self, c: &Constraint) -> String {
        format!(
            "{} {} {}",
            self.fmt_structure(&c.lhs),
            if c.strict { "<" } else { "≤" },
            self.fmt_structure(&c.rhs)
        )
    }

    pub fn fmt_item(&self, item: &Item) -> String {
        match item {
            Item::Constraint(c) => self.fmt_constraint(c),
            Item::Relation(a, b) => format!("w{a}Rw{b}"),
        }
    }

    pub fn contains(&self, c: &Constraint) -> bool {
        self.constraint_set.contains(c)
    }

    pub fn has_relation(&self, a: World, b: World) -> bool {
        self.relation_set.contains(&(a, b))
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(a, b) in &self.relations {
            writeln!(f, "w{a}Rw{b}")?;
        }
        for c in &self.constraints {
            writeln!(f, "{}", self.fmt_constraint(c))?;
        }
        Ok(())
    }
}

pub fn init_tableau(phi: &Formula) -> Branch {
    let mut b = Branch::empty(phi);
    let root = b.arena.root();
    let s = b.lab(0, 1, root);
    b.push_constraint(Constraint::lt(s, Structure::One));
    b
}

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

/// Every rule instance applicable to `b`, in application order.
pub fn applicable_instances(b: &Branch, rules: &RuleTable) -> Vec<Instance> {
    let mut found: Vec<Instance> = Vec::new();

    // A bound constraint `X < 1` (`0 < X`) is not decomposed while a sharper
    // strict constraint `X < X'` (`X' < X`) is present.
    let mut below_other: HashSet<Structure> = HashSet::new();
    let mut above_other: HashSet<Structure> = HashSet::new();
    for c in b.constraints.iter().filter(|c| c.strict) {
        if c.rhs != Structure::One {
            below_other.insert(c.lhs);
        }
        if c.lhs != Structure::Zero {
            above_other.insert(c.rhs);
        }
    }

    let mut outgoing: HashMap<World, Vec<World>> = HashMap::new();
    for &(a, c) in &b.relations {
        outgoing.entry(a).or_default().push(c);
    }

    for c in &b.constraints {
        if c.is_trivial() {
            continue;
        }
        for (dir, s) in [(Dir::Le, c.lhs), (Dir::Ge, c.rhs)] {
            let Structure::Lab { world, index, f } = s else { continue };
            let Some(conn) = conn_of(b.arena.node(f)) else { continue };
            if c.strict && dir == Dir::Le && c.rhs == Structure::One && below_other.contains(&s) {
                continue;
            }
            if c.strict && dir == Dir::Ge && c.lhs == Structure::Zero && above_other.contains(&s) {
                continue;
            }
            let Some(schema) = rules.lookup(conn, index, dir, c.strict) else { continue };
            let mut emit = |relation| {
                let key = Fired {
                    rule: schema.id,
                    constraint: *c,
                    relation,
                };
                if !b.fired.contains(&key) {
                    found.push(Instance {
                        rule: schema.id,
                        class: schema.class,
                        constraint: *c,
                        relation,
                    });
                }
            };
            if schema.class == RuleClass::Propagation {
                for &u in outgoing.get(&world).map(Vec::as_slice).unwrap_or(&[]) {
                    emit(Some((world, u)));
                }
            } else {
                emit(None);
            }
        }
    }
    found.sort_by_key(|i| i.class);
    found
}

fn children(node: Node) -> (FId, FId) {
    match node {
        Node::Neg(a) | Node::Box(a) | Node::Dia(a) => (a, a),
        Node::And(a, b) | Node::Or(a, b) | Node::Imp(a, b) | Node::Coimp(a, b) => (a, b),
        _ => unreachable!("atoms have no rules"),
    }
}

/// Conclusion columns of an instance. Fresh-world rules use `witness`.
fn conclusions(b: &Branch, inst: &Instance, witness: World) -> Vec<Vec<Item>> {
    use Structure::{One, Zero};
    let c = inst.constraint;
    let id = inst.rule;
    let (s, x) = match id.dir {
        Dir::Le => (c.lhs, c.rhs),
        Dir::Ge => (c.rhs, c.lhs),
    };
    let Structure::Lab { world: w, index: i, f } = s else {
        unreachable!("rules decompose labelled structures")
    };
    let strict = c.strict;
    let same = |t: Structure| {
        Item::Constraint(match id.dir {
            Dir::Le => Constraint::new(t, x, strict),
            Dir::Ge => Constraint::new(x, t, strict),
        })
    };
    let le = |a, b| Item::Constraint(Constraint::le(a, b));
    let lt = |a, b| Item::Constraint(Constraint::lt(a, b));
    let (fa, fb) = children(b.arena.node(f));
    let a = b.lab(w, i, fa);
    let bb = b.lab(w, i, fb);

    match family(id.conn, i) {
        Family::Neg => vec![vec![same(b.lab(w, 3 - i, fa))]],
        Family::Min => match id.dir {
            Dir::Ge => vec![vec![same(a), same(bb)]],
            Dir::Le => vec![vec![same(a)], vec![same(bb)]],
        },
        Family::Max => match id.dir {
            Dir::Le => vec![vec![same(a), same(bb)]],
            Dir::Ge => vec![vec![same(a)], vec![same(bb)]],
        },
        Family::Imp { swapped } => {
            let (ant, cons) = if swapped { (bb, a) } else { (a, bb) };
            match (id.dir, strict) {
                (Dir::Le, false) => vec![vec![le(One, x)], vec![lt(x, One), le(cons, x), lt(cons, ant)]],
                (Dir::Le, true) => vec![vec![lt(cons, x), lt(cons, ant)]],
                (Dir::Ge, _) => {
                    let cols = vec![vec![le(ant, cons)], vec![same(cons)]];
                    if swapped {
                        cols.into_iter().rev().collect()
                    } else {
                        cols
                    }
                }
            }
        }
        Family::Coimp { swapped } => {
            let (min, sub) = if swapped { (bb, a) } else { (a, bb) };
            match (id.dir, strict) {
                (Dir::Le, _) => vec![vec![le(min, sub)], vec![same(min)]],
                (Dir::Ge, false) => vec![vec![le(x, Zero)], vec![lt(Zero, x), le(x, min), lt(sub, min)]],
                (Dir::Ge, true) => vec![vec![lt(x, min), lt(sub, min)]],
            }
        }
        fam @ (Family::ModalMin | Family::ModalMax) => {
            let fresh = (fam == Family::ModalMin) == (id.dir == Dir::Le);
            if fresh {
                let mut cols = vec![vec![Item::Relation(w, witness), same(b.lab(witness, i, fa))]];
                if !strict {
                    cols.push(vec![if fam == Family::ModalMin { le(One, x) } else { le(x, Zero) }]);
                }
                cols
            } else {
                let (_, u) = inst.relation.expect("propagation needs a relation");
                vec![vec![same(b.lab(u, i, fa))]]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_constraints: usize,
    pub max_worlds: usize,
    /// Total rule applications over the whole search.
    pub max_steps: Option<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_constraints: 10_000,
            max_worlds: 200,
            max_steps: Some(2_000_000),
        }
    }
}

/// One successor branch per conclusion column, with the instance marked
/// as fired in each.
pub fn apply_instance(b: &Branch, inst: &Instance) -> Result<Vec<Branch>, TableauError> {
    apply_with_caps(b, inst, &Caps::default()).map(|v| v.into_iter().map(|(b, _)| b).collect())
}

fn apply_with_caps(b: &Branch, inst: &Instance, caps: &Caps) -> Result<Vec<(Branch, Vec<Item>)>, TableauError> {
    if b.closed {
        return Err(TableauError::BranchClosed);
    }
    let key = Fired {
        rule: inst.rule,
        constraint: inst.constraint,
        relation: inst.relation,
    };
    if b.fired.contains(&key) || !b.contains(&inst.constraint) {
        return Err(TableauError::NotApplicable);
    }
    if let Some((x, y)) = inst.relation {
        if !b.has_relation(x, y) {
            return Err(TableauError::NotApplicable);
        }
    }
    let mut base = b.clone();
    base.fired.insert(key);

    let mut with_witness = None;
    let mut witness = 0;
    if inst.class == RuleClass::Fresh {
        let mut base = base.clone();
        let s = match inst.rule.dir {
            Dir::Le => inst.constraint.lhs,
            Dir::Ge => inst.constraint.rhs,
        };
        let Structure::Lab { world, index, f } = s else {
            return Err(TableauError::NotApplicable);
        };
        witness = match base.witnesses.get(&(world, index, f)) {
            Some(&u) => u,
            None => {
                let u = base.worlds;
                if u as usize >= caps.max_worlds {
                    return Err(TableauError::ResourceExhausted {
                        resource: "worlds per branch",
                        limit: caps.max_worlds,
                    });
                }
                base.witnesses.insert((world, index, f), u);
                base.worlds += 1;
                u
            }
        };
        with_witness = Some(base);
    }

    let cols = conclusions(&base, inst, witness);
    let mut out = Vec::with_capacity(cols.len());
    for (k, col) in cols.into_iter().enumerate() {
        // Only the first column of a fresh-world rule mentions the witness.
        let mut nb = match (&with_witness, k) {
            (Some(w), 0) => w.clone(),
            _ => base.clone(),
        };
        let mut added = Vec::new();
        for item in col {
            let fresh = match item {
                Item::Constraint(c) => !nb.contains(&c),
                Item::Relation(x, y) => !nb.has_relation(x, y),
            };
            nb.push_item(item);
            if fresh {
                added.push(item);
            }
        }
        if nb.constraints.len() > caps.max_constraints {
            return Err(TableauError::ResourceExhausted {
                resource: "constraints per branch",
                limit: caps.max_constraints,
            });
        }
        out.push((nb, added));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Closure
// ---------------------------------------------------------------------------

/// Closed iff some strongly connected component of the order graph contains
/// a strict edge. Computed from scratch, independently of the incremental
/// check done while the branch grows.
pub fn closure_check(b: &Branch) -> bool {
    let mut g: DiGraph<Structure, bool> = DiGraph::new();
    let mut idx: HashMap<Structure, NodeIndex> = HashMap::new();
    let mut node = |g: &mut DiGraph<Structure, bool>, s: Structure| *idx.entry(s).or_insert_with(|| g.add_node(s));
    let zero = node(&mut g, Structure::Zero);
    let one = node(&mut g, Structure::One);
    g.add_edge(zero, one, true);
    for c in &b.constraints {
        let a = node(&mut g, c.lhs);
        let d = node(&mut g, c.rhs);
        g.add_edge(a, d, c.strict);
    }
    for n in g.node_indices().collect::<Vec<_>>() {
        if n != zero && n != one {
            g.add_edge(zero, n, false);
            g.add_edge(n, one, false);
        }
    }
    let mut comp = vec![0usize; g.node_count()];
    for (k, scc) in tarjan_scc(&g).into_iter().enumerate() {
        for n in scc {
            comp[n.index()] = k;
        }
    }
    g.edge_indices().any(|e| {
        let (a, d) = g.edge_endpoints(e).unwrap();
        g[e] && comp[a.index()] == comp[d.index()]
    })
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceLine {
    Added { branch: String, rule: String, item: String },
    Closed { branch: String },
    Open { branch: String },
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceLine::Added { branch, rule, item } => write!(f, "{branch} {rule} {item}"),
            TraceLine::Closed { branch } => write!(f, "{branch} × closed"),
            TraceLine::Open { branch } => write!(f, "{branch} ☹ open"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub lines: Vec<TraceLine>,
    pub steps: usize,
    pub closed_branches: usize,
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum Saturation {
    Closed(Trace),
    Open { branch: Box<Branch>, trace: Trace },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Logic {
    KG2,
    KbiG,
}

#[derive(Debug, Clone, Copy)]
pub struct ProveOptions {
    pub caps: Caps,
    pub trace: bool,
}

impl Default for ProveOptions {
    fn default() -> Self {
        ProveOptions {
            caps: Caps::default(),
            trace: false,
        }
    }
}

pub fn saturate(phi: &Formula) -> Result<Saturation, TableauError> {
    saturate_with(
        phi,
        &RuleTable::kg2(),
        &ProveOptions {
            trace: true,
            ..Default::default()
        },
    )
}

/// Depth-first search; returns the first complete open branch in
/// deterministic order, or `Closed` when every branch closes.
pub fn saturate_with(phi: &Formula, rules: &RuleTable, opts: &ProveOptions) -> Result<Saturation, TableauError> {
    let mut trace = Trace::default();
    let root = init_tableau(phi);
    if opts.trace {
        trace.lines.push(TraceLine::Added {
            branch: "0".into(),
            rule: "init".into(),
            item: root.fmt_constraint(&root.constraints[0]),
        });
    }
    let mut stack: Vec<(Branch, String)> = vec![(root, "0".into())];
    while let Some((b, id)) = stack.pop() {
        if b.closed {
            trace.closed_branches += 1;
            if opts.trace {
                trace.lines.push(TraceLine::Closed { branch: id });
            }
            continue;
        }
        let Some(inst) = applicable_instances(&b, rules).into_iter().next() else {
            if opts.trace {
                trace.lines.push(TraceLine::Open { branch: id });
            }
            return Ok(Saturation::Open {
                branch: Box::new(b),
                trace,
            });
        };
        trace.steps += 1;
        if let Some(limit) = opts.caps.max_steps {
            if trace.steps > limit {
                return Err(TableauError::ResourceExhausted {
                    resource: "rule applications",
                    limit,
                });
            }
        }
        let succ = apply_with_caps(&b, &inst, &opts.caps)?;
        let many = succ.len() > 1;
        let mut children = Vec::with_capacity(succ.len());
        for (k, (nb, added)) in succ.into_iter().enumerate() {
            let cid = if many { format!("{id}.{}", k + 1) } else { id.clone() };
            if opts.trace {
                for item in &added {
                    trace.lines.push(TraceLine::Added {
                        branch: cid.clone(),
                        rule: inst.rule.name(),
                        item: nb.fmt_item(item),
                    });
                }
            }
            children.push((nb, cid));
        }
        stack.extend(children.into_iter().rev());
    }
    Ok(Saturation::Closed(trace))
}

// ---------------------------------------------------------------------------
// Countermodels
// ---------------------------------------------------------------------------

/// Builds a model realizing an open branch. Variables in the class of 1 get
/// 1, those in the class of 0 get 0; every other variable structure gets
/// `h / D`, where `h` is the largest number of strict steps on a path from 0
/// to it in the order graph and `D = max(2·n·|W|, h_max + 1)`.
pub fn extract_countermodel(b: &Branch, phi: &Formula) -> Result<KripkeModel, TableauError> {
    if b.closed || closure_check(b) {
        return Err(TableauError::BranchClosed);
    }
    let g_nodes = b.graph.nodes();
    let mut g: DiGraph<(), bool> = DiGraph::with_capacity(g_nodes.len(), 0);
    for _ in g_nodes {
        g.add_node(());
    }
    for (a, c, s) in b.graph.edges() {
        g.add_edge(NodeIndex::new(a), NodeIndex::new(c), s);
    }
    let sccs = tarjan_scc(&g);
    let mut comp = vec![0usize; g_nodes.len()];
    for (k, scc) in sccs.iter().enumerate() {
        for n in scc {
            comp[n.index()] = k;
        }
    }
    // tarjan_scc lists components in reverse topological order.
    let mut height = vec![0u64; sccs.len()];
    for k in (0..sccs.len()).rev() {
        for n in &sccs[k] {
            for e in g.edges(*n) {
                use petgraph::visit::EdgeRef;
                let t = comp[e.target().index()];
                if t != k {
                    height[t] = height[t].max(height[k] + *e.weight() as u64);
                }
            }
        }
    }
    let zero_comp = comp[0];
    let one_comp = comp[1];

    let arena = b.arena();
    let mut atoms: Vec<(World, u8, u32, usize)> = Vec::new();
    for (i, s) in g_nodes.iter().enumerate() {
        if let Structure::Lab { world, index, f } = *s {
            if let Node::Var(v) = arena.node(f) {
                atoms.push((world, index, v, comp[i]));
            }
        }
    }
    let n_vars = phi.variables().len().max(1) as u64;
    let n_worlds = b.world_count() as u64;
    let max_h = atoms
        .iter()
        .filter(|a| a.3 != one_comp && a.3 != zero_comp)
        .map(|a| height[a.3])
        .max()
        .unwrap_or(0);
    let denom = (2 * n_vars * n_worlds).max(max_h + 1);

    let names: Vec<String> = (0..b.worlds).map(Branch::world_name).collect();
    let mut m = KripkeModel::crisp(&names)?;
    for &(x, y) in b.relations() {
        m.add_edge(&names[x as usize], &names[y as usize])?;
    }
    let mut vals: HashMap<(World, u32), (UnitValue, UnitValue)> = HashMap::new();
    for (world, index, v, c) in atoms {
        let value = if c == one_comp {
            UnitValue::one()
        } else if c == zero_comp {
            UnitValue::zero()
        } else {
            UnitValue::from_ratio(BigRational::new(BigInt::from(height[c]), BigInt::from(denom)))
                .map_err(|e| TableauError::ExtractionFailed(e.to_string()))?
        };
        let entry = vals
            .entry((world, v))
            .or_insert_with(|| (UnitValue::zero(), UnitValue::zero()));
        if index == 1 {
            entry.0 = value;
        } else {
            entry.1 = value;
        }
    }
    let mut keys: Vec<_> = vals.into_iter().collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0));
    for ((world, v), (pos, neg)) in keys {
        m.set_value(&names[world as usize], &arena.vars()[v as usize], PairValue::new(pos, neg))?;
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Valid(Trace),
    Invalid {
        model: KripkeModel,
        branch: Box<Branch>,
        world: String,
        trace: Trace,
    },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid(_))
    }

    pub fn trace(&self) -> &Trace {
        match self {
            Verdict::Valid(t) | Verdict::Invalid { trace: t, .. } => t,
        }
    }

    pub fn model(&self) -> Option<&KripkeModel> {
        match self {
            Verdict::Valid(_) => None,
            Verdict::Invalid { model, .. } => Some(model),
        }
    }
}

pub fn prove(phi: &Formula, logic: Logic) -> Result<Verdict, TableauError> {
    prove_with(phi, logic, &ProveOptions::default())
}

/// Decides validity. An `Invalid` verdict is only returned after its model
/// has been checked to realize the open branch and to give `φ` support of
/// truth below 1 at `w0`.
pub fn prove_with(phi: &Formula, logic: Logic, opts: &ProveOptions) -> Result<Verdict, TableauError> {
    let rules = match logic {
        Logic::KG2 => RuleTable::kg2(),
        Logic::KbiG => {
            if phi.contains_neg() {
                return Err(TableauError::NegationInKbig);
            }
            RuleTable::kbig()
        }
    };
    match saturate_with(phi, &rules, opts)? {
        Saturation::Closed(trace) => Ok(Verdict::Valid(trace)),
        Saturation::Open { branch, trace } => {
            let model = extract_countermodel(&branch, phi)?;
            if !check_realization(&model, &branch)? {
                return Err(TableauError::ExtractionFailed(format!(
                    "model does not realize the open branch\n{}{}",
                    branch,
                    model.to_json_string()
                )));
            }
            let value = eval_kg2(&model, "w0", phi)?;
            if value.pos.is_one() {
                return Err(TableauError::ExtractionFailed(format!(
                    "model does not falsify the formula\n{}",
                    model.to_json_string()
                )));
            }
            Ok(Verdict::Invalid {
                model,
                branch,
                world: "w0".into(),
                trace,
            })
        }
    }
}
