//! Brute-force countermodel search over small crisp models and a finite
//! value grid, plus the random-formula harness that pits the search against
//! the tableau prover.
//!
//! [`enumerate_models`] lists every model of a [`GridSpec`] in a fixed order.
//! [`oracle_search`] answers the same question, "is there a model in the grid
//! where `φ` has support of truth below 1 somewhere?", without visiting all of
//! them. Gödel operations commute with order automorphisms of `[0,1]` that fix
//! 0 and 1, so only the relative order of the variable values matters. The
//! search enumerates orderings instead of values: each (world, variable,
//! component) cell is 0, 1, or one of `m` interior levels, every interior
//! level is used, and `m < d`. Level `j` is realized as `j/d`. Only cells the
//! root's support of truth can depend on are varied; the rest stay 0.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{coimp, imp, PairValue, UnitValue};
use crate::formula::{var, Formula, FormulaArena, Node};
use crate::kripke::{check_realization, eval_kg2, eval_kg2_all, KripkeError, KripkeModel};
use crate::tableau::{prove_with, Caps, Logic, ProveOptions, TableauError, Verdict};

/// Largest world count the searches accept (relations are bitmasks).
pub const MAX_WORLDS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("max_worlds must be between 1 and {MAX_WORLDS}, got {0}")]
    Worlds(usize),
    #[error("denominator must be between 1 and 254, got {0}")]
    Denominator(u32),
    #[error("oracle produced a model that does not re-verify: {0}")]
    Unverified(String),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub max_worlds: usize,
    pub denominator: u32,
    pub variables: Vec<String>,
}

impl GridSpec {
    pub fn new(max_worlds: usize, denominator: u32, variables: Vec<String>) -> Result<Self, OracleError> {
        if max_worlds == 0 || max_worlds > MAX_WORLDS {
            return Err(OracleError::Worlds(max_worlds));
        }
        if denominator == 0 || denominator > 254 {
            return Err(OracleError::Denominator(denominator));
        }
        Ok(GridSpec {
            max_worlds,
            denominator,
            variables,
        })
    }

    /// Variables of `φ`, denominator `2·n·max_worlds` (with `n ≥ 1`).
    pub fn for_formula(phi: &Formula, max_worlds: usize) -> Result<Self, OracleError> {
        let vars = phi.variables();
        let n = vars.len().max(1);
        Self::new(max_worlds, (2 * n * max_worlds).min(254) as u32, vars)
    }

    fn value(&self, level: u32) -> UnitValue {
        UnitValue::new(level as u64, self.denominator as u64).expect("level within grid")
    }
}

// ---------------------------------------------------------------------------
// Full enumeration
// ---------------------------------------------------------------------------

/// All crisp models of a grid: world count ascending, then relation bitmask,
/// then valuation in mixed radix (first digit least significant). Digit
/// `(w·n + v)·2 + c` is the component `c` of variable `v` at world `w`.
#[derive(Debug, Clone)]
pub struct ModelEnumerator {
    spec: GridSpec,
    /// Models with exactly `k + 1` worlds.
    block: Vec<u128>,
    next: u128,
}

pub fn enumerate_models(spec: &GridSpec) -> ModelEnumerator {
    let n = spec.variables.len() as u32;
    let radix = spec.denominator as u128 + 1;
    let block = (1..=spec.max_worlds as u32)
        .map(|k| {
            let rels = 1u128.checked_shl(k * k).unwrap_or(u128::MAX);
            radix.checked_pow(2 * n * k).and_then(|v| v.checked_mul(rels)).unwrap_or(u128::MAX)
        })
        .collect();
    ModelEnumerator {
        spec: spec.clone(),
        block,
        next: 0,
    }
}

fn world_names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("w{i}")).collect()
}

impl ModelEnumerator {
    /// Total number of models; saturates at `u128::MAX`.
    pub fn len(&self) -> u128 {
        self.block.iter().fold(0u128, |a, &b| a.saturating_add(b))
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The `i`-th model of the stream.
    pub fn model_at(&self, mut i: u128) -> Option<KripkeModel> {
        let mut k = 0;
        while k < self.block.len() && i >= self.block[k] {
            i -= self.block[k];
            k += 1;
        }
        if k == self.block.len() {
            return None;
        }
        let k = k + 1;
        let n = self.spec.variables.len();
        let radix = self.spec.denominator as u128 + 1;
        let vals = radix.pow(2 * (n * k) as u32);
        let (rel, mut digits) = (i / vals, i % vals);
        let names = world_names(k);
        let mut m = KripkeModel::crisp(&names).expect("non-empty");
        for a in 0..k {
            for b in 0..k {
                if rel >> (a * k + b) & 1 == 1 {
                    m.add_edge(&names[a], &names[b]).expect("declared");
                }
            }
        }
        for w in 0..k {
            for v in 0..n {
                let pos = (digits % radix) as u32;
                digits /= radix;
                let neg = (digits % radix) as u32;
                digits /= radix;
                let value = PairValue::new(self.spec.value(pos), self.spec.value(neg));
                m.set_value(&names[w], &self.spec.variables[v], value).expect("declared");
            }
        }
        Some(m)
    }

    /// The sub-stream `[start, end)`, for splitting work.
    pub fn range(&self, start: u128, end: u128) -> impl Iterator<Item = KripkeModel> + '_ {
        (start..end.min(self.len())).map_while(move |i| self.model_at(i))
    }
}

impl Iterator for ModelEnumerator {
    type Item = KripkeModel;
    fn next(&mut self) -> Option<KripkeModel> {
        let m = self.model_at(self.next)?;
        self.next += 1;
        Some(m)
    }
}

// ---------------------------------------------------------------------------
// Small-integer evaluation
// ---------------------------------------------------------------------------

/// A formula compiled for evaluation over levels `0..=top`, where the value
/// of each variable component is read from a cell array.
struct Compiled {
    arena: FormulaArena,
    /// Cell index for `(var, component)`; `None` means constant 0.
    cell_of: Vec<[Option<usize>; 2]>,
    cells_per_world: usize,
}

impl Compiled {
    fn new(phi: &Formula, slots: &[(u32, bool)]) -> Self {
        let arena = FormulaArena::new(phi);
        let mut cell_of = vec![[None, None]; arena.vars().len()];
        for (i, &(v, c)) in slots.iter().enumerate() {
            cell_of[v as usize][c as usize] = Some(i);
        }
        Compiled {
            arena,
            cell_of,
            cells_per_world: slots.len(),
        }
    }

    /// Fills `buf[fid * k + w]` and returns the root row.
    fn eval<'b>(&self, succ: &[u32], cells: &[u8], top: u8, buf: &'b mut Vec<(u8, u8)>) -> &'b [(u8, u8)] {
        let k = succ.len();
        let len = self.arena.len();
        buf.clear();
        buf.resize(len * k, (0, 0));
        for id in 0..len {
            let node = self.arena.node(id as u32);
            for w in 0..k {
                let at = |f: u32| buf[f as usize * k + w];
                let v = match node {
                    Node::Var(v) => {
                        let read = |c: Option<usize>| c.map_or(0, |c| cells[w * self.cells_per_world + c]);
                        let [p, n] = self.cell_of[v as usize];
                        (read(p), read(n))
                    }
                    Node::Const0 => (0, top),
                    Node::Const1 => (top, 0),
                    Node::Neg(a) => {
                        let (p, n) = at(a);
                        (n, p)
                    }
                    Node::And(a, b) => {
                        let (x, y) = (at(a), at(b));
                        (x.0.min(y.0), x.1.max(y.1))
                    }
                    Node::Or(a, b) => {
                        let (x, y) = (at(a), at(b));
                        (x.0.max(y.0), x.1.min(y.1))
                    }
                    Node::Imp(a, b) => {
                        let (x, y) = (at(a), at(b));
                        (imp(&x.0, &y.0, &top), coimp(&y.1, &x.1, &0))
                    }
                    Node::Coimp(a, b) => {
                        let (x, y) = (at(a), at(b));
                        (coimp(&x.0, &y.0, &0), imp(&y.1, &x.1, &top))
                    }
                    Node::Box(a) | Node::Dia(a) => {
                        let is_box = matches!(node, Node::Box(_));
                        let (mut p, mut n) = if is_box { (top, 0) } else { (0, top) };
                        let mut bits = succ[w];
                        while bits != 0 {
                            let u = bits.trailing_zeros() as usize;
                            bits &= bits - 1;
                            let (x, y) = buf[a as usize * k + u];
                            if is_box {
                                p = p.min(x);
                                n = n.max(y);
                            } else {
                                p = p.max(x);
                                n = n.min(y);
                            }
                        }
                        (p, n)
                    }
                };
                buf[id * k + w] = v;
            }
        }
        let root = self.arena.root() as usize;
        &buf[root * k..(root + 1) * k]
    }
}

fn successors(rel: u64, k: usize) -> Vec<u32> {
    let mask = (1u64 << k) - 1;
    (0..k).map(|w| ((rel >> (w * k)) & mask) as u32).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Goal {
    /// Some world has support of truth below 1.
    Falsify,
    /// Every world has support of truth 1.
    HoldEverywhere,
}

impl Goal {
    fn met(self, root: &[(u8, u8)], top: u8) -> Option<usize> {
        match self {
            Goal::Falsify => root.iter().position(|v| v.0 < top),
            Goal::HoldEverywhere => root.iter().all(|v| v.0 == top).then_some(0),
        }
    }
}

// ---------------------------------------------------------------------------
// Searches
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Countermodel { model: KripkeModel, world: String },
    ExhaustedNoCountermodel,
    BudgetExceeded { tried: u64 },
}

impl SearchOutcome {
    pub fn is_countermodel(&self) -> bool {
        matches!(self, SearchOutcome::Countermodel { .. })
    }
}

fn build_model(k: usize, rel: u64, cells: &[u8], slots: &[(u32, bool)], vars: &[String], level: impl Fn(u8) -> UnitValue) -> KripkeModel {
    let names = world_names(k);
    let mut m = KripkeModel::crisp(&names).expect("non-empty");
    for (a, bits) in successors(rel, k).into_iter().enumerate() {
        for b in 0..k {
            if bits >> b & 1 == 1 {
                m.add_edge(&names[a], &names[b]).expect("declared");
            }
        }
    }
    for w in 0..k {
        let mut pairs: Vec<(UnitValue, UnitValue)> = vec![(UnitValue::zero(), UnitValue::zero()); vars.len()];
        for (i, &(v, c)) in slots.iter().enumerate() {
            let x = level(cells[w * slots.len() + i]);
            if c {
                pairs[v as usize].1 = x;
            } else {
                pairs[v as usize].0 = x;
            }
        }
        for (v, (p, n)) in pairs.into_iter().enumerate() {
            m.set_value(&names[w], &vars[v], PairValue::new(p, n)).expect("declared");
        }
    }
    m
}

fn verify(m: &KripkeModel, world: &str, phi: &Formula, goal: Goal) -> Result<(), OracleError> {
    let ok = match goal {
        Goal::Falsify => !eval_kg2(m, world, phi)?.pos.is_one(),
        Goal::HoldEverywhere => eval_kg2_all(m, phi)?.iter().all(|r| r.value.pos.is_one()),
    };
    if ok {
        Ok(())
    } else {
        Err(OracleError::Unverified(m.to_json_string()))
    }
}

/// Number of cell assignments over `{0, 1, 1..m}` that use every interior
/// level (inclusion-exclusion).
fn surjective_count(cells: u32, m: u32) -> f64 {
    let mut total = 0.0;
    let mut binom = 1.0;
    for j in 0..=m {
        let term = binom * ((m + 2 - j) as f64).powi(cells as i32);
        total += if j % 2 == 0 { term } else { -term };
        binom = binom * (m - j) as f64 / (j + 1) as f64;
    }
    total.max(0.0)
}

/// Order-type search; see the module docs. Stages `(world count, interior
/// levels)` run cheapest first, so small countermodels surface early.
fn quotient_search(phi: &Formula, spec: &GridSpec, goal: Goal, budget: Option<u64>) -> Result<SearchOutcome, OracleError> {
    let slots = FormulaArena::new(phi).relevant_slots();
    let compiled = Compiled::new(phi, &slots);
    let s = slots.len();
    let d = spec.denominator;
    let mut stages: Vec<(f64, u32, usize)> = Vec::new();
    for k in 1..=spec.max_worlds {
        let cells = (s * k) as u32;
        for m in 0..=cells.min(d - 1) {
            let cost = 2f64.powi((k * k) as i32) * surjective_count(cells, m);
            stages.push((cost, m, k));
        }
    }
    stages.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut tried = 0u64;
    let mut buf = Vec::new();
    for (_, m, k) in stages {
        let top = (m + 1) as u8;
        let n_cells = s * k;
        let mut cells = vec![0u8; n_cells];
        let mut used = vec![0u32; m as usize + 2];
        for rel in 0..(1u64 << (k * k)) {
            let succ = successors(rel, k);
            cells.iter_mut().for_each(|c| *c = 0);
            used.iter_mut().for_each(|u| *u = 0);
            used[0] = n_cells as u32;
            loop {
                if used[1..=m as usize].iter().all(|&u| u > 0) {
                    if let Some(b) = budget {
                        if tried >= b {
                            return Ok(SearchOutcome::BudgetExceeded { tried });
                        }
                    }
                    tried += 1;
                    // Digit value `top` stands for 1, `1..=m` for interior levels.
                    let root = compiled.eval(&succ, &cells, top, &mut buf);
                    if let Some(w) = goal.met(root, top) {
                        let level = |x: u8| {
                            if x == top {
                                UnitValue::one()
                            } else {
                                spec.value(x as u32)
                            }
                        };
                        let model = build_model(k, rel, &cells, &slots, compiled.arena.vars(), level);
                        let world = format!("w{w}");
                        verify(&model, &world, phi, goal)?;
                        return Ok(SearchOutcome::Countermodel { model, world });
                    }
                }
                // Odometer over digits 0..=top, first cell least significant.
                let mut i = 0;
                loop {
                    if i == n_cells {
                        break;
                    }
                    used[cells[i] as usize] -= 1;
                    if cells[i] < top {
                        cells[i] += 1;
                        used[cells[i] as usize] += 1;
                        break;
                    }
                    cells[i] = 0;
                    used[0] += 1;
                    i += 1;
                }
                if i == n_cells {
                    break;
                }
            }
        }
    }
    Ok(SearchOutcome::ExhaustedNoCountermodel)
}

/// Searches the grid for a model and world where `φ` has support of truth
/// below 1. Any model returned has been re-checked with the rational
/// evaluator.
pub fn oracle_search(phi: &Formula, spec: &GridSpec) -> Result<SearchOutcome, OracleError> {
    oracle_search_with_budget(phi, spec, None)
}

pub fn oracle_search_with_budget(phi: &Formula, spec: &GridSpec, budget: Option<u64>) -> Result<SearchOutcome, OracleError> {
    quotient_search(phi, spec, Goal::Falsify, budget)
}

/// Visits every grid model in enumeration order, evaluating over grid
/// levels directly. Exponentially slower than [`oracle_search`]; kept as
/// the reference it is tested against.
pub fn full_grid_search(phi: &Formula, spec: &GridSpec, budget: Option<u64>) -> Result<SearchOutcome, OracleError> {
    let arena = FormulaArena::new(phi);
    let slots: Vec<(u32, bool)> = (0..arena.vars().len() as u32).flat_map(|v| [(v, false), (v, true)]).collect();
    let compiled = Compiled::new(phi, &slots);
    let top = spec.denominator as u8;
    let mut tried = 0u64;
    let mut buf = Vec::new();
    for k in 1..=spec.max_worlds {
        let n_cells = slots.len() * k;
        for rel in 0..(1u64 << (k * k)) {
            let succ = successors(rel, k);
            let mut cells = vec![0u8; n_cells];
            loop {
                if budget.is_some_and(|b| tried >= b) {
                    return Ok(SearchOutcome::BudgetExceeded { tried });
                }
                tried += 1;
                let root = compiled.eval(&succ, &cells, top, &mut buf);
                if let Some(w) = Goal::Falsify.met(root, top) {
                    let model = build_model(k, rel, &cells, &slots, compiled.arena.vars(), |x| spec.value(x as u32));
                    let world = format!("w{w}");
                    verify(&model, &world, phi, Goal::Falsify)?;
                    return Ok(SearchOutcome::Countermodel { model, world });
                }
                let mut i = 0;
                while i < n_cells && cells[i] == top {
                    cells[i] = 0;
                    i += 1;
                }
                if i == n_cells {
                    break;
                }
                cells[i] += 1;
            }
        }
    }
    Ok(SearchOutcome::ExhaustedNoCountermodel)
}

/// A grid model on which `φ` has support of truth 1 at every world.
pub fn find_global_model(phi: &Formula, spec: &GridSpec) -> Result<Option<KripkeModel>, OracleError> {
    Ok(match quotient_search(phi, spec, Goal::HoldEverywhere, None)? {
        SearchOutcome::Countermodel { model, .. } => Some(model),
        _ => None,
    })
}

/// `∼∼(p → ◇p)`: every world sees a world where `p` is at least as true.
pub fn phi_leq() -> Formula {
    let p = var("p");
    Formula::gneg(Formula::gneg(Formula::imp(p.clone(), Formula::dia(p))))
}

/// `∼∼(p ⨪ ◇p)`: every world is strictly truer than all it sees.
pub fn phi_gt() -> Formula {
    let p = var("p");
    Formula::gneg(Formula::gneg(Formula::coimp(p.clone(), Formula::dia(p))))
}

/// True iff no grid model makes `φ≤ ∧ φ>` true at every world. Together the
/// two formulas demand an infinite strictly descending chain of successors.
pub fn finite_unsat_check(max_worlds: usize, d: u32) -> Result<bool, OracleError> {
    let phi = Formula::and(phi_leq(), phi_gt());
    let spec = GridSpec::new(max_worlds, d, vec!["p".into()])?;
    Ok(find_global_model(&phi, &spec)?.is_none())
}

// ---------------------------------------------------------------------------
// Random formulas and models
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FormulaBounds {
    pub max_vars: usize,
    pub max_modal_depth: usize,
    pub max_nodes: usize,
    pub allow_neg: bool,
}

impl Default for FormulaBounds {
    fn default() -> Self {
        FormulaBounds {
            max_vars: 3,
            max_modal_depth: 2,
            max_nodes: 12,
            allow_neg: true,
        }
    }
}

const VAR_NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the `index`-th formula of a run.
pub fn formula_seed(master: u64, index: u64) -> u64 {
    splitmix(master ^ splitmix(index))
}

/// Operator mix: 40% binary, 20% negation (half `!`, half `~`), 20% modal,
/// 20% atoms and constants. Respects every bound in `b`.
pub fn random_formula(seed: u64, b: &FormulaBounds) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen(&mut rng, b.max_nodes.max(1), b.max_modal_depth, b)
}

fn atom(rng: &mut ChaCha8Rng, b: &FormulaBounds) -> Formula {
    if b.max_vars == 0 || rng.gen_bool(0.15) {
        if rng.gen_bool(0.5) {
            Formula::Const0
        } else {
            Formula::Const1
        }
    } else {
        var(VAR_NAMES[rng.gen_range(0..b.max_vars.min(VAR_NAMES.len()))])
    }
}

fn gen(rng: &mut ChaCha8Rng, budget: usize, depth: usize, b: &FormulaBounds) -> Formula {
    if budget == 1 {
        return atom(rng, b);
    }
    let roll = rng.gen_range(0..100);
    if roll < 40 && budget >= 3 {
        let left = rng.gen_range(1..=budget - 2);
        let x = gen(rng, left, depth, b);
        let y = gen(rng, budget - 1 - left, depth, b);
        return match rng.gen_range(0..4) {
            0 => Formula::and(x, y),
            1 => Formula::or(x, y),
            2 => Formula::imp(x, y),
            _ => Formula::coimp(x, y),
        };
    }
    if (40..60).contains(&roll) {
        let de_morgan = b.allow_neg && (budget < 3 || rng.gen_bool(0.5));
        if de_morgan {
            return Formula::neg(gen(rng, budget - 1, depth, b));
        }
        if budget >= 3 {
            return Formula::gneg(gen(rng, budget - 2, depth, b));
        }
    }
    if (60..80).contains(&roll) && depth > 0 {
        let sub = gen(rng, budget - 1, depth - 1, b);
        return if rng.gen_bool(0.5) {
            Formula::boxed(sub)
        } else {
            Formula::dia(sub)
        };
    }
    atom(rng, b)
}

fn random_unit(rng: &mut ChaCha8Rng, d: u64) -> UnitValue {
    UnitValue::new(rng.gen_range(0..=d), d).expect("grid value")
}

/// A crisp model with 1..=max_worlds worlds, edge probability 1/2, and
/// values on the grid with denominator `d` for `vars`.
pub fn random_crisp_model(seed: u64, max_worlds: usize, vars: &[&str], d: u64) -> KripkeModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=max_worlds.max(1));
    let names = world_names(k);
    let mut m = KripkeModel::crisp(&names).expect("non-empty");
    for a in &names {
        for b in &names {
            if rng.gen_bool(0.5) {
                m.add_edge(a, b).expect("declared");
            }
        }
    }
    for w in &names {
        for v in vars {
            let value = PairValue::new(random_unit(&mut rng, d), random_unit(&mut rng, d));
            m.set_value(w, v, value).expect("declared");
        }
    }
    m
}

/// A fuzzy model: each ordered pair gets weight 0 with probability 1/3,
/// otherwise a random grid weight.
pub fn random_fuzzy_model(seed: u64, max_worlds: usize, vars: &[&str], d: u64) -> KripkeModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=max_worlds.max(1));
    let names = world_names(k);
    let mut m = KripkeModel::fuzzy(&names).expect("non-empty");
    for a in &names {
        for b in &names {
            if !rng.gen_bool(1.0 / 3.0) {
                m.set_weight(a, b, random_unit(&mut rng, d)).expect("declared");
            }
        }
    }
    for w in &names {
        for v in vars {
            m.set_value(w, v, PairValue::new(random_unit(&mut rng, d), UnitValue::zero()))
                .expect("declared");
        }
    }
    m
}

// ---------------------------------------------------------------------------
// Agreement harness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct AgreementConfig {
    pub count: usize,
    pub seed: u64,
    pub bounds: FormulaBounds,
    pub oracle_worlds: usize,
    /// Fixed grid denominator; `None` uses `2·n·oracle_worlds`.
    pub oracle_den: Option<u32>,
    pub oracle_budget: Option<u64>,
    pub prover_steps: usize,
    /// Also compare single-valued and two-valued verdicts on `!`-free formulas.
    pub compare_kbig: bool,
    pub run_oracle: bool,
}

impl Default for AgreementConfig {
    fn default() -> Self {
        AgreementConfig {
            count: 1000,
            seed: 42,
            bounds: FormulaBounds::default(),
            oracle_worlds: 3,
            oracle_den: Some(18),
            oracle_budget: Some(5_000_000),
            prover_steps: 200_000,
            compare_kbig: true,
            run_oracle: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    /// The oracle found a countermodel, the prover said valid.
    OracleRefutesValid,
    /// The prover's countermodel fits the grid, yet the oracle exhausted it.
    OracleMissesCountermodel,
    /// The prover's countermodel failed re-checking.
    BadCountermodel,
    /// Single-valued and two-valued verdicts differ on a `!`-free formula.
    LogicsDisagree,
    /// The prover reported an internal error.
    ProverError,
    /// The oracle reported an internal error.
    OracleError,
}

#[derive(Debug, Clone, Serialize)]
pub struct Discrepancy {
    pub index: usize,
    pub seed: u64,
    pub formula: String,
    pub kind: DiscrepancyKind,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub total: usize,
    pub valid: usize,
    pub invalid: usize,
    pub prover_inconclusive: usize,
    pub countermodels_checked: usize,
    pub oracle_countermodel: usize,
    pub oracle_exhausted: usize,
    pub oracle_budget_exceeded: usize,
    pub oracle_skipped: usize,
    pub neg_free: usize,
    pub kbig_agreements: usize,
    pub kbig_inconclusive: usize,
    pub discrepancies: Vec<Discrepancy>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.discrepancies.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "formulas            {}", self.total)?;
        writeln!(f, "prover valid        {}", self.valid)?;
        writeln!(f, "prover invalid      {}", self.invalid)?;
        writeln!(f, "prover inconclusive {}", self.prover_inconclusive)?;
        writeln!(f, "models re-checked   {}", self.countermodels_checked)?;
        writeln!(f, "oracle countermodel {}", self.oracle_countermodel)?;
        writeln!(f, "oracle exhausted    {}", self.oracle_exhausted)?;
        writeln!(f, "oracle over budget  {}", self.oracle_budget_exceeded)?;
        writeln!(f, "oracle skipped      {}", self.oracle_skipped)?;
        writeln!(f, "!-free formulas     {}", self.neg_free)?;
        writeln!(f, "logics agree        {}", self.kbig_agreements)?;
        writeln!(f, "discrepancies       {}", self.discrepancies.len())?;
        for d in &self.discrepancies {
            writeln!(f, "  #{} seed={} {:?} {}: {}", d.index, d.seed, d.kind, d.formula, d.detail)?;
        }
        Ok(())
    }
}

enum Outcome {
    Valid,
    Invalid(usize),
    Inconclusive,
}

/// Runs prover and oracle on `count` random formulas and records every
/// disagreement with the seed that reproduces it.
pub fn agreement_run(cfg: &AgreementConfig) -> Report {
    let mut report = Report::default();
    let opts = ProveOptions {
        caps: Caps {
            max_steps: Some(cfg.prover_steps),
            ..Caps::default()
        },
        trace: false,
    };
    for index in 0..cfg.count {
        let seed = formula_seed(cfg.seed, index as u64);
        let phi = random_formula(seed, &cfg.bounds);
        let text = phi.to_string();
        report.total += 1;
        let mut flag = |kind, detail: String| {
            report.discrepancies.push(Discrepancy {
                index,
                seed,
                formula: text.clone(),
                kind,
                detail,
            })
        };

        let outcome = match prove_with(&phi, Logic::KG2, &opts) {
            Ok(Verdict::Valid(_)) => Outcome::Valid,
            Ok(Verdict::Invalid { model, branch, world, .. }) => {
                let realizes = check_realization(&model, &branch).unwrap_or(false);
                let falsifies = eval_kg2(&model, &world, &phi).map(|v| !v.pos.is_one()).unwrap_or(false);
                if realizes && falsifies {
                    report.countermodels_checked += 1;
                } else {
                    flag(DiscrepancyKind::BadCountermodel, model.to_json().to_string());
                }
                Outcome::Invalid(model.worlds().len())
            }
            Err(TableauError::ResourceExhausted { .. }) => Outcome::Inconclusive,
            Err(e) => {
                flag(DiscrepancyKind::ProverError, e.to_string());
                Outcome::Inconclusive
            }
        };
        match outcome {
            Outcome::Valid => report.valid += 1,
            Outcome::Invalid(_) => report.invalid += 1,
            Outcome::Inconclusive => report.prover_inconclusive += 1,
        }

        if cfg.run_oracle {
            let spec = match cfg.oracle_den {
                Some(d) => GridSpec::new(cfg.oracle_worlds, d, phi.variables()),
                None => GridSpec::for_formula(&phi, cfg.oracle_worlds),
            };
            match spec.and_then(|s| oracle_search_with_budget(&phi, &s, cfg.oracle_budget)) {
                Ok(SearchOutcome::Countermodel { model, .. }) => {
                    report.oracle_countermodel += 1;
                    if matches!(outcome, Outcome::Valid) {
                        flag(DiscrepancyKind::OracleRefutesValid, model.to_json().to_string());
                    }
                }
                Ok(SearchOutcome::ExhaustedNoCountermodel) => {
                    report.oracle_exhausted += 1;
                    if let Outcome::Invalid(k) = outcome {
                        if k <= cfg.oracle_worlds {
                            flag(DiscrepancyKind::OracleMissesCountermodel, format!("prover model has {k} worlds"));
                        }
                    }
                }
                Ok(SearchOutcome::BudgetExceeded { .. }) => report.oracle_budget_exceeded += 1,
                Err(e) => flag(DiscrepancyKind::OracleError, e.to_string()),
            }
        } else {
            report.oracle_skipped += 1;
        }

        if cfg.compare_kbig && !phi.contains_neg() {
            report.neg_free += 1;
            let kbig = prove_with(&phi, Logic::KbiG, &opts);
            match (&outcome, kbig) {
                (Outcome::Inconclusive, _) | (_, Err(TableauError::ResourceExhausted { .. })) => {
                    report.kbig_inconclusive += 1
                }
                (_, Err(e)) => flag(DiscrepancyKind::ProverError, format!("single-valued: {e}")),
                (o, Ok(v)) => {
                    if matches!(o, Outcome::Valid) == v.is_valid() {
                        report.kbig_agreements += 1;
                    } else {
                        flag(
                            DiscrepancyKind::LogicsDisagree,
                            format!("two-valued valid={}, single-valued valid={}", matches!(o, Outcome::Valid), v.is_valid()),
                        );
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use proptest::prelude::*;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        let one_var = GridSpec::new(1, 2, vec!["p".into()]).unwrap();
        let e = enumerate_models(&one_var);
        assert_eq!(e.len(), 18);
        assert_eq!(e.clone().count(), 18);
        let no_var = GridSpec::new(1, 2, vec![]).unwrap();
        assert_eq!(enumerate_models(&no_var).len(), 2);
        assert_eq!(enumerate_models(&no_var).count(), 2);
        let two_worlds = GridSpec::new(2, 1, vec!["p".into()]).unwrap();
        assert_eq!(enumerate_models(&two_worlds).len(), 2 * 4 + 16 * 16);
    }

    #[test]
    fn enumeration_is_deterministic_and_indexable() {
        let spec = GridSpec::new(2, 1, vec!["p".into()]).unwrap();
        let a: Vec<_> = enumerate_models(&spec).collect();
        let b: Vec<_> = enumerate_models(&spec).collect();
        assert_eq!(a, b);
        let e = enumerate_models(&spec);
        for (i, m) in a.iter().enumerate().step_by(17) {
            assert_eq!(&e.model_at(i as u128).unwrap(), m);
        }
        let part: Vec<_> = e.range(5, 40).collect();
        assert_eq!(part, a[5..40].to_vec());
        assert!(e.model_at(e.len()).is_none());
    }

    #[test]
    fn search_examples() {
        let spec = GridSpec::new(1, 4, vec!["p".into(), "q".into()]).unwrap();
        let SearchOutcome::Countermodel { model, world } = oracle_search(&f("(p & !p) -> q"), &spec).unwrap() else {
            panic!("expected a countermodel")
        };
        assert!(eval_kg2(&model, &world, &f("(p & !p) -> q")).unwrap().pos < UnitValue::one());

        for (k, d) in [(1, 2), (2, 4), (3, 6)] {
            let spec = GridSpec::new(k, d, vec!["p".into()]).unwrap();
            assert_eq!(oracle_search(&f("p -> p"), &spec).unwrap(), SearchOutcome::ExhaustedNoCountermodel);
        }
    }

    #[test]
    fn finite_branching_formula_has_no_finite_countermodel_at_two_worlds() {
        let spec = GridSpec::new(2, 8, vec!["p".into(), "q".into()]).unwrap();
        assert_eq!(
            oracle_search(&f("1 -< <>((p -< q) & q)"), &spec).unwrap(),
            SearchOutcome::ExhaustedNoCountermodel
        );
    }

    #[test]
    fn unsat_check_small() {
        assert!(finite_unsat_check(2, 8).unwrap());
        let spec = GridSpec::new(2, 8, vec!["p".into()]).unwrap();
        let m = find_global_model(&phi_leq(), &spec).unwrap().expect("a self-loop model");
        assert!(crate::kripke::is_valid_on_model(&m, &phi_leq()).unwrap());
    }

    #[test]
    fn budget_is_reported() {
        let spec = GridSpec::new(3, 12, vec!["p".into(), "q".into()]).unwrap();
        let out = oracle_search_with_budget(&f("1 -< <>((p -< q) & q)"), &spec, Some(1000)).unwrap();
        assert_eq!(out, SearchOutcome::BudgetExceeded { tried: 1000 });
    }

    #[test]
    fn surjection_counts() {
        // m = 0: all of {0,1}^n
        assert_eq!(surjective_count(3, 0), 8.0);
        // one interior level must appear among 2 cells: 3^2 - 2^2
        assert_eq!(surjective_count(2, 1), 5.0);
        assert_eq!(surjective_count(1, 2), 0.0);
    }

    #[test]
    fn generator_respects_bounds() {
        let b = FormulaBounds::default();
        for i in 0..2000 {
            let phi = random_formula(formula_seed(9, i), &b);
            assert!(phi.size() <= 12, "{phi}");
            assert!(phi.modal_depth() <= 2, "{phi}");
            assert!(phi.variables().len() <= 3, "{phi}");
        }
        let nf = FormulaBounds {
            allow_neg: false,
            ..b
        };
        for i in 0..500 {
            assert!(!random_formula(i, &nf).contains_neg());
        }
        assert_eq!(random_formula(5, &b), random_formula(5, &b));
    }

    #[test]
    fn generator_mix_is_roughly_as_documented() {
        let b = FormulaBounds::default();
        let (mut modal, mut neg, mut total) = (0, 0, 0);
        for i in 0..500 {
            let phi = random_formula(formula_seed(1, i), &b);
            for s in phi.subformulas() {
                total += 1;
                match s {
                    Formula::Box(_) | Formula::Dia(_) => modal += 1,
                    Formula::Neg(_) => neg += 1,
                    _ => {}
                }
            }
        }
        assert!(modal * 20 > total, "{modal}/{total}");
        assert!(neg * 30 > total, "{neg}/{total}");
    }

    #[test]
    fn small_agreement_run() {
        let cfg = AgreementConfig {
            count: 40,
            seed: 3,
            oracle_worlds: 2,
            oracle_den: None,
            oracle_budget: Some(20_000),
            ..AgreementConfig::default()
        };
        let r = agreement_run(&cfg);
        assert!(r.ok(), "{r}");
        assert_eq!(r.total, 40);
        assert!(r.to_json().contains("\"discrepancies\""));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn quotient_and_full_grid_agree(seed in any::<u64>(), k in 1usize..=2, d in 1u32..=3) {
            let bounds = FormulaBounds { max_vars: 2, max_nodes: 8, ..FormulaBounds::default() };
            let phi = random_formula(seed, &bounds);
            let spec = GridSpec::new(k, d, phi.variables()).unwrap();
            let fast = oracle_search(&phi, &spec).unwrap();
            let full = full_grid_search(&phi, &spec, None).unwrap();
            prop_assert_eq!(fast.is_countermodel(), full.is_countermodel(), "{}", phi);
        }

        #[test]
        fn small_evaluator_matches_rationals(seed in any::<u64>(), mseed in any::<u64>()) {
            let phi = random_formula(seed, &FormulaBounds::default());
            let m = random_crisp_model(mseed, 3, &["p", "q", "r"], 6);
            let vars = phi.variables();
            let arena = FormulaArena::new(&phi);
            let slots: Vec<(u32, bool)> = (0..vars.len() as u32).flat_map(|v| [(v, false), (v, true)]).collect();
            let c = Compiled::new(&phi, &slots);
            let k = m.worlds().len();
            let mut cells = vec![0u8; slots.len() * k];
            for w in 0..k {
                for (i, &(v, comp)) in slots.iter().enumerate() {
                    let x = m.value(w, &arena.vars()[v as usize]);
                    let u = if comp { x.neg } else { x.pos };
                    cells[w * slots.len() + i] = (u.numer() * 6u32 / u.denom()).try_into().unwrap();
                }
            }
            let succ: Vec<u32> = m.successors().iter().map(|s| s.iter().fold(0, |a, &b| a | 1 << b)).collect();
            let mut buf = Vec::new();
            let root = c.eval(&succ, &cells, 6, &mut buf).to_vec();
            let exact = eval_kg2_all(&m, &phi).unwrap();
            for w in 0..k {
                let six = |x: &UnitValue| -> u8 { (x.numer() * 6u32 / x.denom()).try_into().unwrap() };
                prop_assert_eq!(root[w], (six(&exact[w].value.pos), six(&exact[w].value.neg)));
            }
        }
    }
}
