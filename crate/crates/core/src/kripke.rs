//! Finite Kripke models, crisp and fuzzy, with direct evaluation.
//!
//! A crisp model evaluates every formula to a [`PairValue`]; `□` takes the
//! minimum of the successors' support of truth and the maximum of their
//! support of falsity, `◇` the other way round. At a dead end `□φ` is
//! `(1,0)` and `◇φ` is `(0,1)`.
//!
//! Fuzzy models only carry the single-valued semantics ([`eval_kbig`]),
//! where `□φ = min_u (R(w,u) → φ(u))` and `◇φ = max_u min(R(w,u), φ(u))`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{imp, pair_step, PairConnective, PairValue, UnitValue, ValueError};
use crate::formula::{FId, Formula, FormulaArena, Node};
use crate::tableau::{Branch, Structure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error("empty world set")]
    EmptyWorlds,
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("edge ({from}, {to}) mentions an undeclared world")]
    UndeclaredEdge { from: String, to: String },
    #[error("weight out of [0,1]: {0}")]
    WeightOutOfRange(String),
    #[error("`relation` and `fuzzy_relation` are mutually exclusive")]
    BothRelations,
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("this operation needs a crisp model")]
    FuzzyModel,
    #[error("formula contains De Morgan negation, which the single-valued semantics lacks")]
    NegationInKbig,
    #[error("branch mentions world `{0}`, which the model lacks")]
    UnknownBranchWorld(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Accessibility {
    Crisp(BTreeSet<(usize, usize)>),
    Fuzzy(BTreeMap<(usize, usize), UnitValue>),
}

/// A finite model. Worlds are kept sorted; edges and valuation refer to them
/// by position in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    worlds: Vec<String>,
    access: Accessibility,
    valuation: BTreeMap<(usize, String), PairValue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalResult {
    pub world: String,
    pub value: PairValue,
}

impl KripkeModel {
    fn with_access<S: AsRef<str>>(worlds: &[S], access: Accessibility) -> Result<Self, KripkeError> {
        if worlds.is_empty() {
            return Err(KripkeError::EmptyWorlds);
        }
        let mut ws: Vec<String> = worlds.iter().map(|w| w.as_ref().to_string()).collect();
        ws.sort();
        for pair in ws.windows(2) {
            if pair[0] == pair[1] {
                return Err(KripkeError::DuplicateWorld(pair[0].clone()));
            }
        }
        Ok(KripkeModel {
            worlds: ws,
            access,
            valuation: BTreeMap::new(),
        })
    }

    pub fn crisp<S: AsRef<str>>(worlds: &[S]) -> Result<Self, KripkeError> {
        Self::with_access(worlds, Accessibility::Crisp(BTreeSet::new()))
    }

    pub fn fuzzy<S: AsRef<str>>(worlds: &[S]) -> Result<Self, KripkeError> {
        Self::with_access(worlds, Accessibility::Fuzzy(BTreeMap::new()))
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_index(&self, w: &str) -> Result<usize, KripkeError> {
        self.worlds
            .binary_search_by(|x| x.as_str().cmp(w))
            .map_err(|_| KripkeError::UnknownWorld(w.to_string()))
    }

    pub fn is_fuzzy(&self) -> bool {
        matches!(self.access, Accessibility::Fuzzy(_))
    }

    pub fn accessibility(&self) -> &Accessibility {
        &self.access
    }

    fn edge_indices(&self, from: &str, to: &str) -> Result<(usize, usize), KripkeError> {
        match (self.world_index(from), self.world_index(to)) {
            (Ok(a), Ok(b)) => Ok((a, b)),
            _ => Err(KripkeError::UndeclaredEdge {
                from: from.to_string(),
                to: to.to_string(),
            }),
        }
    }

    /// Adds a crisp edge, or a fuzzy edge of weight 1.
    pub fn add_edge(&mut self, from: &str, to: &str) -> Result<(), KripkeError> {
        let e = self.edge_indices(from, to)?;
        match &mut self.access {
            Accessibility::Crisp(s) => {
                s.insert(e);
            }
            Accessibility::Fuzzy(m) => {
                m.insert(e, UnitValue::one());
            }
        }
        Ok(())
    }

    /// Sets a fuzzy edge weight. A weight of 0 removes the edge.
    pub fn set_weight(&mut self, from: &str, to: &str, weight: UnitValue) -> Result<(), KripkeError> {
        let e = self.edge_indices(from, to)?;
        match &mut self.access {
            Accessibility::Crisp(_) => Err(KripkeError::Schema {
                path: "fuzzy_relation".into(),
                message: "weights need a fuzzy model".into(),
            }),
            Accessibility::Fuzzy(m) => {
                if weight.is_zero() {
                    m.remove(&e);
                } else {
                    m.insert(e, weight);
                }
                Ok(())
            }
        }
    }

    pub fn set_value(&mut self, world: &str, var: &str, value: PairValue) -> Result<(), KripkeError> {
        let w = self.world_index(world)?;
        self.valuation.insert((w, var.to_string()), value);
        Ok(())
    }

    /// Value of a variable; unlisted pairs are `(0,0)`.
    pub fn value(&self, world: usize, var: &str) -> PairValue {
        self.valuation
            .get(&(world, var.to_string()))
            .cloned()
            .unwrap_or_else(PairValue::neither)
    }

    /// Successor lists, indexed by world. For fuzzy models, every edge with
    /// positive weight.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.worlds.len()];
        match &self.access {
            Accessibility::Crisp(s) => s.iter().for_each(|&(a, b)| succ[a].push(b)),
            Accessibility::Fuzzy(m) => m.keys().for_each(|&(a, b)| succ[a].push(b)),
        }
        succ
    }

    pub fn edge_count(&self) -> usize {
        match &self.access {
            Accessibility::Crisp(s) => s.len(),
            Accessibility::Fuzzy(m) => m.len(),
        }
    }

    fn weight(&self, a: usize, b: usize) -> UnitValue {
        match &self.access {
            Accessibility::Crisp(s) => {
                if s.contains(&(a, b)) {
                    UnitValue::one()
                } else {
                    UnitValue::zero()
                }
            }
            Accessibility::Fuzzy(m) => m.get(&(a, b)).cloned().unwrap_or_else(UnitValue::zero),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut valuation: BTreeMap<String, BTreeMap<String, ValueEntry>> = BTreeMap::new();
        for ((w, var), v) in &self.valuation {
            valuation
                .entry(self.worlds[*w].clone())
                .or_default()
                .insert(var.clone(), ValueEntry::Pair(v.pos.to_string(), v.neg.to_string()));
        }
        let mut file = ModelFile {
            worlds: self.worlds.clone(),
            relation: None,
            fuzzy_relation: None,
            valuation,
        };
        match &self.access {
            Accessibility::Crisp(s) => {
                file.relation = Some(
                    s.iter()
                        .map(|&(a, b)| (self.worlds[a].clone(), self.worlds[b].clone()))
                        .collect(),
                )
            }
            Accessibility::Fuzzy(m) => {
                file.fuzzy_relation = Some(
                    m.iter()
                        .map(|(&(a, b), x)| (self.worlds[a].clone(), self.worlds[b].clone(), x.to_string()))
                        .collect(),
                )
            }
        }
        serde_json::to_value(file).expect("model serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("model serializes")
    }
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    worlds: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    relation: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fuzzy_relation: Option<Vec<(String, String, String)>>,
    #[serde(default)]
    valuation: BTreeMap<String, BTreeMap<String, ValueEntry>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ValueEntry {
    Pos(String),
    Pair(String, String),
}

fn parse_unit(path: String, text: &str) -> Result<UnitValue, KripkeError> {
    text.parse::<UnitValue>().map_err(|e: ValueError| KripkeError::Schema {
        path,
        message: e.to_string(),
    })
}

/// Parses and validates a model from JSON text.
pub fn parse_model(text: &str) -> Result<KripkeModel, KripkeError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ModelFile = serde_path_to_error::deserialize(de).map_err(|e| KripkeError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    let mut m = match (&file.relation, &file.fuzzy_relation) {
        (Some(_), Some(_)) => return Err(KripkeError::BothRelations),
        (_, Some(_)) => KripkeModel::fuzzy(&file.worlds)?,
        _ => KripkeModel::crisp(&file.worlds)?,
    };
    for (a, b) in file.relation.iter().flatten() {
        m.add_edge(a, b)?;
    }
    for (i, (a, b, x)) in file.fuzzy_relation.iter().flatten().enumerate() {
        let weight = x.parse::<UnitValue>().map_err(|e| match e {
            ValueError::OutOfRange(_) => KripkeError::WeightOutOfRange(x.clone()),
            other => KripkeError::Schema {
                path: format!("fuzzy_relation[{i}][2]"),
                message: other.to_string(),
            },
        })?;
        m.set_weight(a, b, weight)?;
    }
    for (w, vars) in &file.valuation {
        if m.world_index(w).is_err() {
            return Err(KripkeError::Schema {
                path: format!("valuation.{w}"),
                message: format!("undeclared world `{w}`"),
            });
        }
        for (var, entry) in vars {
            let path = format!("valuation.{w}.{var}");
            let value = match entry {
                ValueEntry::Pos(p) => PairValue::new(parse_unit(path, p)?, UnitValue::zero()),
                ValueEntry::Pair(p, n) => PairValue::new(
                    parse_unit(format!("{path}[0]"), p)?,
                    parse_unit(format!("{path}[1]"), n)?,
                ),
            };
            m.set_value(w, var, value)?;
        }
    }
    Ok(m)
}

/// Reads a model from a file path, or parses the argument itself when it
/// looks like inline JSON.
pub fn load_model(path_or_text: &str) -> Result<KripkeModel, KripkeError> {
    if path_or_text.trim_start().starts_with('{') {
        return parse_model(path_or_text);
    }
    let text = std::fs::read_to_string(Path::new(path_or_text)).map_err(|e| KripkeError::Schema {
        path: path_or_text.to_string(),
        message: e.to_string(),
    })?;
    parse_model(&text)
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Evaluates every subformula at every world over an arbitrary totally
/// ordered carrier. Returns `table[world][fid] = (pos, neg)`.
pub fn eval_table<T, V>(arena: &FormulaArena, succ: &[Vec<usize>], val: V, zero: &T, one: &T) -> Vec<Vec<(T, T)>>
where
    T: Ord + Clone,
    V: Fn(usize, u32) -> (T, T),
{
    let n = succ.len();
    let mut table: Vec<Vec<(T, T)>> = vec![Vec::with_capacity(arena.len()); n];
    for id in 0..arena.len() as FId {
        let node = arena.node(id);
        for w in 0..n {
            let value = match node {
                Node::Var(v) => val(w, v),
                Node::Const0 => (zero.clone(), one.clone()),
                Node::Const1 => (one.clone(), zero.clone()),
                Node::Neg(a) => {
                    let (p, q) = &table[w][a as usize];
                    (q.clone(), p.clone())
                }
                Node::And(a, b) | Node::Or(a, b) | Node::Imp(a, b) | Node::Coimp(a, b) => {
                    let conn = match node {
                        Node::And(..) => PairConnective::And,
                        Node::Or(..) => PairConnective::Or,
                        Node::Imp(..) => PairConnective::Imp,
                        _ => PairConnective::Coimp,
                    };
                    let (x, y) = (&table[w][a as usize], &table[w][b as usize]);
                    pair_step(conn, (&x.0, &x.1), (&y.0, &y.1), zero, one)
                }
                Node::Box(a) => {
                    let vals = succ[w].iter().map(|&u| &table[u][a as usize]);
                    let pos = vals.clone().map(|x| &x.0).min().unwrap_or(one).clone();
                    let neg = vals.map(|x| &x.1).max().unwrap_or(zero).clone();
                    (pos, neg)
                }
                Node::Dia(a) => {
                    let vals = succ[w].iter().map(|&u| &table[u][a as usize]);
                    let pos = vals.clone().map(|x| &x.0).max().unwrap_or(zero).clone();
                    let neg = vals.map(|x| &x.1).min().unwrap_or(one).clone();
                    (pos, neg)
                }
            };
            table[w].push(value);
        }
    }
    table
}

fn kg2_table(m: &KripkeModel, arena: &FormulaArena) -> Result<Vec<Vec<(UnitValue, UnitValue)>>, KripkeError> {
    if m.is_fuzzy() {
        return Err(KripkeError::FuzzyModel);
    }
    let vars = arena.vars();
    Ok(eval_table(
        arena,
        &m.successors(),
        |w, v| {
            let x = m.value(w, &vars[v as usize]);
            (x.pos, x.neg)
        },
        &UnitValue::zero(),
        &UnitValue::one(),
    ))
}

/// Value of `φ` at every world, in world order.
pub fn eval_kg2_all(m: &KripkeModel, phi: &Formula) -> Result<Vec<EvalResult>, KripkeError> {
    let arena = FormulaArena::new(phi);
    let table = kg2_table(m, &arena)?;
    let root = arena.root() as usize;
    Ok(table
        .into_iter()
        .enumerate()
        .map(|(w, row)| {
            let (pos, neg) = row[root].clone();
            EvalResult {
                world: m.worlds[w].clone(),
                value: PairValue::new(pos, neg),
            }
        })
        .collect())
}

pub fn eval_kg2(m: &KripkeModel, w: &str, phi: &Formula) -> Result<PairValue, KripkeError> {
    let i = m.world_index(w)?;
    Ok(eval_kg2_all(m, phi)?.swap_remove(i).value)
}

/// Single-valued semantics; works on crisp and fuzzy models alike.
pub fn eval_kbig_all(m: &KripkeModel, phi: &Formula) -> Result<Vec<UnitValue>, KripkeError> {
    if phi.contains_neg() {
        return Err(KripkeError::NegationInKbig);
    }
    let arena = FormulaArena::new(phi);
    let root = arena.root() as usize;
    if !m.is_fuzzy() {
        return Ok(kg2_table(m, &arena)?.into_iter().map(|row| row[root].0.clone()).collect());
    }
    let (zero, one) = (UnitValue::zero(), UnitValue::one());
    let n = m.worlds.len();
    let vars = arena.vars();
    let mut table: Vec<Vec<UnitValue>> = vec![Vec::with_capacity(arena.len()); n];
    for id in 0..arena.len() as FId {
        for w in 0..n {
            let at = |t: &Vec<Vec<UnitValue>>, u: usize, f: FId| t[u][f as usize].clone();
            let value = match arena.node(id) {
                Node::Var(v) => m.value(w, &vars[v as usize]).pos,
                Node::Const0 => zero.clone(),
                Node::Const1 => one.clone(),
                Node::Neg(_) => unreachable!("checked above"),
                Node::And(a, b) => at(&table, w, a).min(at(&table, w, b)),
                Node::Or(a, b) => at(&table, w, a).max(at(&table, w, b)),
                Node::Imp(a, b) => imp(&at(&table, w, a), &at(&table, w, b), &one),
                Node::Coimp(a, b) => crate::algebra::coimp(&at(&table, w, a), &at(&table, w, b), &zero),
                Node::Box(a) => (0..n)
                    .map(|u| imp(&m.weight(w, u), &table[u][a as usize], &one))
                    .min()
                    .unwrap_or_else(|| one.clone()),
                Node::Dia(a) => (0..n)
                    .map(|u| m.weight(w, u).min(at(&table, u, a)))
                    .max()
                    .unwrap_or_else(|| zero.clone()),
            };
            table[w].push(value);
        }
    }
    Ok(table.into_iter().map(|row| row[root].clone()).collect())
}

pub fn eval_kbig(m: &KripkeModel, w: &str, phi: &Formula) -> Result<UnitValue, KripkeError> {
    let i = m.world_index(w)?;
    Ok(eval_kbig_all(m, phi)?.swap_remove(i))
}

/// `φ` has support of truth 1 at every world. The support of falsity need
/// not be checked: validity of the first component at every model implies
/// validity of the second on the dual model.
pub fn is_valid_on_model(m: &KripkeModel, phi: &Formula) -> Result<bool, KripkeError> {
    Ok(eval_kg2_all(m, phi)?.iter().all(|r| r.value.pos.is_one()))
}

/// Same frame; every variable value `(x,y)` becomes `(1-y, 1-x)`.
pub fn dual_transform(m: &KripkeModel) -> KripkeModel {
    let mut out = m.clone();
    for v in out.valuation.values_mut() {
        *v = v.dual();
    }
    out
}

/// Does `m` realize every constraint of the branch? World labels of the
/// branch are looked up by name.
pub fn check_realization(m: &KripkeModel, branch: &Branch) -> Result<bool, KripkeError> {
    let n_labels = branch.world_count();
    let mut index = Vec::with_capacity(n_labels);
    for w in 0..n_labels {
        let name = Branch::world_name(w as u32);
        index.push(m.world_index(&name).map_err(|_| KripkeError::UnknownBranchWorld(name))?);
    }
    for &(a, b) in branch.relations() {
        if m.weight(index[a as usize], index[b as usize]).is_zero() {
            return Ok(false);
        }
    }
    let arena = branch.arena();
    let table = kg2_table(m, arena)?;
    let read = |s: &Structure| -> UnitValue {
        match *s {
            Structure::Zero => UnitValue::zero(),
            Structure::One => UnitValue::one(),
            Structure::Lab { world, index: 1, f } => table[index[world as usize]][f as usize].0.clone(),
            Structure::Lab { world, f, .. } => table[index[world as usize]][f as usize].1.clone(),
        }
    };
    Ok(branch.constraints().iter().all(|c| {
        let (a, b) = (read(&c.lhs), read(&c.rhs));
        if c.strict {
            a < b
        } else {
            a <= b
        }
    }))
}

/// Per-world lookup by name, convenient for callers holding world labels.
pub fn world_map(m: &KripkeModel) -> HashMap<String, usize> {
    m.worlds.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect()
}
