//! End-to-end acceptance gates. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use kg2::algebra::{PairValue, UnitValue};
use kg2::formula::{parse, var, Formula};
use kg2::kripke::{dual_transform, eval_kbig, eval_kbig_all, eval_kg2};
use kg2::oracle::{
    agreement_run, find_global_model, finite_unsat_check, formula_seed, phi_leq, random_crisp_model, random_formula,
    random_fuzzy_model, AgreementConfig, DiscrepancyKind, FormulaBounds, GridSpec,
};
use kg2::tableau::{prove, saturate, Constraint, Logic, Saturation, TraceLine, Verdict};

fn f(s: &str) -> Formula {
    parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

struct Gate {
    failures: usize,
}

impl Gate {
    fn report(&mut self, n: u32, name: &str, ok: bool, detail: String, elapsed: Duration) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("criterion {n} {name}: {verdict} ({detail}; {:.2?})", elapsed);
        if !ok {
            self.failures += 1;
        }
    }
}

fn golden(g: &mut Gate) {
    let t = Instant::now();
    let cases: [(&str, Logic, bool); 9] = [
        ("1 -< <>((p -< q) & q)", Logic::KG2, true),
        ("~~[](p | ~p)", Logic::KG2, true),
        ("p -> p", Logic::KG2, true),
        ("D(p->q) | D(q->p)", Logic::KbiG, true),
        ("(p & !p) -> q", Logic::KG2, false),
        ("[](p & !p) -> []q", Logic::KG2, false),
        ("<>(p & !p) -> <>q", Logic::KG2, false),
        ("[]p -> [][]p", Logic::KG2, false),
        ("Dn(p->q) | Dn(q->p)", Logic::KG2, false),
    ];
    let mut exact = 0;
    let mut slow = Vec::new();
    for (text, logic, valid) in cases {
        let start = Instant::now();
        let got = prove(&f(text), logic).map(|v| v.is_valid());
        if start.elapsed() >= Duration::from_secs(1) {
            slow.push(text);
        }
        if got == Ok(valid) {
            exact += 1;
        } else {
            println!("  {text}: expected valid={valid}, got {got:?}");
        }
    }
    g.report(
        1,
        "golden validity table",
        exact == 9 && slow.is_empty(),
        format!("{exact}/9 exact, {} over 1 s", slow.len()),
        t.elapsed(),
    );
}

fn reproduction(g: &mut Gate) {
    let t = Instant::now();
    let left_closed = match saturate(&f("1 -< <>((p -< q) & q)")) {
        Ok(Saturation::Closed(trace)) => {
            trace.closed_branches > 0 && !trace.lines.iter().any(|l| matches!(l, TraceLine::Open { .. }))
        }
        _ => false,
    };
    let phi = f("[]p -> [][]p");
    let right = match saturate(&phi) {
        Ok(Saturation::Open { branch, trace }) => {
            let p = var("p");
            let s = |w| branch.structure(w, 1, &p).expect("p is a subformula");
            let relations = branch.has_relation(0, 1) && branch.has_relation(1, 2);
            // w1:1:p > w2:1:p
            let strict = branch.contains(&Constraint::lt(s(2), s(1)));
            let traced = trace.lines.iter().any(|l| matches!(l, TraceLine::Open { .. }));
            let value = match prove(&phi, Logic::KG2) {
                Ok(Verdict::Invalid { model, world, .. }) => {
                    let w1 = model.value(model.world_index("w1").unwrap(), "p").pos;
                    world == "w0"
                        && eval_kg2(&model, "w0", &phi).unwrap().pos == UnitValue::zero()
                        && w1 == UnitValue::new(1, 6).unwrap()
                }
                _ => false,
            };
            relations && strict && traced && value
        }
        _ => false,
    };
    g.report(
        2,
        "worked derivations",
        left_closed && right,
        format!("closed tableau {left_closed}, three-world chain {right}"),
        t.elapsed(),
    );
}

fn prover_vs_oracle(g: &mut Gate) {
    let t = Instant::now();
    let report = agreement_run(&AgreementConfig::default());
    let elapsed = t.elapsed();
    let bad_models = report
        .discrepancies
        .iter()
        .filter(|d| d.kind == DiscrepancyKind::BadCountermodel)
        .count();
    let sound = report.prover_inconclusive == 0
        && bad_models == 0
        && report.countermodels_checked == report.invalid
        && elapsed < Duration::from_secs(300);
    g.report(
        3,
        "countermodel soundness",
        sound,
        format!(
            "{} formulas, {} invalid, {} models re-checked, {} prover inconclusive",
            report.total, report.invalid, report.countermodels_checked, report.prover_inconclusive
        ),
        elapsed,
    );
    let disagreements = report
        .discrepancies
        .iter()
        .filter(|d| {
            matches!(
                d.kind,
                DiscrepancyKind::OracleRefutesValid | DiscrepancyKind::OracleMissesCountermodel | DiscrepancyKind::OracleError
            )
        })
        .count();
    g.report(
        4,
        "oracle agreement",
        disagreements == 0,
        format!(
            "{disagreements} disagreements; oracle found {} countermodels, exhausted {}, over budget {}",
            report.oracle_countermodel, report.oracle_exhausted, report.oracle_budget_exceeded
        ),
        elapsed,
    );
    if !report.ok() {
        print!("{report}");
    }
}

fn bounds() -> FormulaBounds {
    FormulaBounds::default()
}

fn duality(g: &mut Gate) {
    let t = Instant::now();
    let mut agree = 0;
    for i in 0..1000u64 {
        let phi = random_formula(formula_seed(500, i), &bounds());
        let m = random_crisp_model(formula_seed(501, i), 3, &["p", "q", "r"], 12);
        let dual = dual_transform(&m);
        let w = &m.worlds()[(i as usize) % m.worlds().len()];
        let v = eval_kg2(&m, w, &phi).unwrap();
        let expected = PairValue::new(v.neg.complement(), v.pos.complement());
        if eval_kg2(&dual, w, &phi).unwrap() == expected {
            agree += 1;
        }
    }
    g.report(5, "duality fuzz", agree == 1000, format!("{agree}/1000 exact"), t.elapsed());
}

fn conservativity(g: &mut Gate) {
    let t = Instant::now();
    let b = FormulaBounds {
        allow_neg: false,
        ..bounds()
    };
    let mut verdicts = 0;
    for i in 0..500u64 {
        let phi = random_formula(formula_seed(600, i), &b);
        let two = prove(&phi, Logic::KG2).map(|v| v.is_valid());
        let one = prove(&phi, Logic::KbiG).map(|v| v.is_valid());
        if two.is_ok() && two == one {
            verdicts += 1;
        } else {
            println!("  {phi}: two-valued {two:?}, single-valued {one:?}");
        }
    }
    let mut values = 0;
    for i in 0..500u64 {
        let phi = random_formula(formula_seed(601, i), &b);
        let m = random_crisp_model(formula_seed(602, i), 3, &["p", "q", "r"], 12);
        let w = &m.worlds()[(i as usize) % m.worlds().len()];
        if eval_kbig(&m, w, &phi).unwrap() == eval_kg2(&m, w, &phi).unwrap().pos {
            values += 1;
        }
    }
    g.report(
        6,
        "conservativity fuzz",
        verdicts == 500 && values == 500,
        format!("verdicts {verdicts}/500, values {values}/500"),
        t.elapsed(),
    );
}

fn no_finite_model(g: &mut Gate) {
    let t = Instant::now();
    let small = finite_unsat_check(2, 8).unwrap();
    let large_start = Instant::now();
    let large = finite_unsat_check(3, 12).unwrap();
    let large_time = large_start.elapsed();
    let spec = GridSpec::new(3, 12, vec!["p".into()]).unwrap();
    let inversion_unsat = find_global_model(&phi_leq(), &spec).unwrap().is_none();
    g.report(
        7,
        "no finite model",
        small && large && !inversion_unsat && large_time < Duration::from_secs(600),
        format!("(2,8) {small}, (3,12) {large}, first conjunct alone unsat {inversion_unsat}"),
        t.elapsed(),
    );
}

fn fuzzy_finite_branching(g: &mut Gate) {
    let t = Instant::now();
    let phi = f("1 -< <>((p -< q) & q)");
    let mut ok = 0;
    for i in 0..500u64 {
        let m = random_fuzzy_model(formula_seed(800, i), 5, &["p", "q"], 10);
        if eval_kbig_all(&m, &phi).unwrap().iter().all(UnitValue::is_one) {
            ok += 1;
        }
    }
    g.report(8, "finite fuzzy models are finitely branching", ok == 500, format!("{ok}/500"), t.elapsed());
}

/// Truth-table evaluation with `0`/`1` values, independent of the prover.
fn classical(phi: &Formula, env: u32, vars: &[String]) -> bool {
    match phi {
        Formula::Var(v) => env >> vars.iter().position(|x| x == v).unwrap() & 1 == 1,
        Formula::Const0 => false,
        Formula::Const1 => true,
        Formula::And(a, b) => classical(a, env, vars) && classical(b, env, vars),
        Formula::Or(a, b) => classical(a, env, vars) || classical(b, env, vars),
        Formula::Imp(a, b) => !classical(a, env, vars) || classical(b, env, vars),
        other => panic!("not classical: {other}"),
    }
}

fn tautology(phi: &Formula) -> bool {
    let vars = phi.variables();
    (0..1u32 << vars.len()).all(|env| classical(phi, env, &vars))
}

fn classical_embedding(g: &mut Gate) {
    let t = Instant::now();
    let tautologies = [
        "p -> p",
        "p | ~p",
        "~~p -> p",
        "p -> ~~p",
        "((p -> q) -> p) -> p",
        "p -> (q -> p)",
        "(p -> (q -> r)) -> ((p -> q) -> (p -> r))",
        "(p & q) -> p",
        "(p & q) -> q",
        "p -> (p | q)",
        "q -> (p | q)",
        "(p -> r) -> ((q -> r) -> ((p | q) -> r))",
        "~(p & q) -> (~p | ~q)",
        "(~p | ~q) -> ~(p & q)",
        "~(p | q) -> (~p & ~q)",
        "(p -> q) -> (~q -> ~p)",
        "(~q -> ~p) -> (p -> q)",
        "(p -> q) | (q -> p)",
        "0 -> p",
        "(p & (p -> q)) -> q",
    ];
    let non_tautologies = [
        "p",
        "~p",
        "p -> q",
        "(p -> q) -> p",
        "(p | q) -> p",
        "p -> (p & q)",
        "(p -> q) -> (q -> p)",
        "~(p & q) -> ~p",
        "p | q",
        "(p -> r) -> (p -> q)",
    ];
    let mut ok = 0;
    for text in tautologies {
        let phi = f(text);
        assert!(tautology(&phi), "{text} is not a tautology");
        if prove(&phi.embed_classical().unwrap(), Logic::KG2).is_ok_and(|v| v.is_valid()) {
            ok += 1;
        } else {
            println!("  tautology {text} not proved");
        }
    }
    let k = f("[](p->q) -> ([]p -> []q)");
    if prove(&k, Logic::KG2).is_ok_and(|v| v.is_valid()) {
        ok += 1;
    } else {
        println!("  K axiom not proved");
    }
    for text in non_tautologies {
        let phi = f(text);
        assert!(!tautology(&phi), "{text} is a tautology");
        if prove(&phi.embed_classical().unwrap(), Logic::KG2).is_ok_and(|v| !v.is_valid()) {
            ok += 1;
        } else {
            println!("  non-tautology {text} not refuted");
        }
    }
    g.report(9, "classical embedding", ok == 31, format!("{ok}/31"), t.elapsed());
}

fn main() {
    let mut g = Gate { failures: 0 };
    golden(&mut g);
    reproduction(&mut g);
    prover_vs_oracle(&mut g);
    duality(&mut g);
    conservativity(&mut g);
    no_finite_model(&mut g);
    fuzzy_finite_branching(&mut g);
    classical_embedding(&mut g);
    if g.failures > 0 {
        println!("{} criteria failed", g.failures);
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
