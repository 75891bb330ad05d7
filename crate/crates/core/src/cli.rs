//! Command-line front end. Exit codes: 0 valid / satisfiable / no
//! discrepancies, 1 invalid / unsatisfiable / discrepancies found, 2 usage
//! error, parse error or inconclusive run.

use clap::{Parser, Subcommand, ValueEnum};

use crate::formula::{parse, Formula};
use crate::kripke::{eval_kbig_all, eval_kg2_all, load_model};
use crate::oracle::{agreement_run, oracle_search_with_budget, AgreementConfig, GridSpec, SearchOutcome};
use crate::tableau::{prove_with, Logic, ProveOptions, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kg2", version, about = "Tableau prover and model checker for two-dimensional modal Gödel logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LogicArg {
    Kg2,
    Kbig,
}

impl From<LogicArg> for Logic {
    fn from(l: LogicArg) -> Logic {
        match l {
            LogicArg::Kg2 => Logic::KG2,
            LogicArg::Kbig => Logic::KbiG,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide validity; prints VALID or a countermodel as JSON.
    Prove {
        formula: String,
        #[arg(long, value_enum, default_value = "kg2")]
        logic: LogicArg,
        /// Print the derivation to stderr.
        #[arg(long)]
        trace: bool,
        /// Decide satisfiability instead (support of truth 1 at some world).
        #[arg(long)]
        satisfiable: bool,
    },
    /// Evaluate a formula on a model file or inline JSON.
    Check {
        #[arg(long)]
        model: String,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        world: Option<String>,
        #[arg(long, value_enum, default_value = "kg2")]
        logic: LogicArg,
    },
    /// Like `prove`, always printing the model or VALID.
    Countermodel {
        formula: String,
        #[arg(long, value_enum, default_value = "kg2")]
        logic: LogicArg,
    },
    /// Brute-force search for a countermodel over a finite grid.
    Oracle {
        formula: String,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        /// Grid denominator; defaults to 2·(variables)·(max worlds).
        #[arg(long)]
        den: Option<u32>,
        /// Maximum number of model evaluations.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Compare prover and oracle on seeded random formulas.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        #[arg(long, default_value_t = 18)]
        den: u32,
        #[arg(long, default_value_t = 5_000_000)]
        budget: u64,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn new(code: i32, stdout: impl Into<String>) -> Self {
        Output {
            code,
            stdout: stdout.into(),
            stderr: String::new(),
        }
    }

    fn error(message: impl Into<String>) -> Self {
        let mut s = message.into();
        if !s.ends_with('\n') {
            s.push('\n');
        }
        Output {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: s,
        }
    }
}

fn line(s: impl Into<String>) -> String {
    let mut s = s.into();
    s.push('\n');
    s
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output::error(text)
            } else {
                Output::new(EXIT_OK, text)
            };
        }
    };
    match cli.command {
        Command::Prove {
            formula,
            logic,
            trace,
            satisfiable,
        } => prove_cmd(&formula, logic.into(), trace, satisfiable),
        Command::Countermodel { formula, logic } => prove_cmd(&formula, logic.into(), false, false),
        Command::Check {
            model,
            formula,
            world,
            logic,
        } => check_cmd(&model, &formula, world.as_deref(), logic.into()),
        Command::Oracle {
            formula,
            max_worlds,
            den,
            budget,
        } => oracle_cmd(&formula, max_worlds, den, budget),
        Command::Fuzz {
            n,
            seed,
            max_worlds,
            den,
            budget,
            json,
        } => {
            let cfg = AgreementConfig {
                count: n,
                seed,
                oracle_worlds: max_worlds,
                oracle_den: Some(den),
                oracle_budget: Some(budget),
                ..AgreementConfig::default()
            };
            let report = agreement_run(&cfg);
            let text = if json { line(report.to_json()) } else { report.to_string() };
            Output::new(if report.ok() { EXIT_OK } else { EXIT_NEGATIVE }, text)
        }
    }
}

fn parse_arg(text: &str) -> Result<Formula, Output> {
    parse(text).map_err(|e| Output::error(format!("{e}\n  {text}\n  {}^", " ".repeat(e.position))))
}

/// `φ` has support of truth 1 somewhere iff `∼∼(1 ⨪ φ)` can be falsified.
pub fn satisfiability_probe(phi: &Formula) -> Formula {
    Formula::gneg(Formula::gneg(Formula::coimp(Formula::Const1, phi.clone())))
}

fn prove_cmd(text: &str, logic: Logic, trace: bool, satisfiable: bool) -> Output {
    let phi = match parse_arg(text) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let target = if satisfiable { satisfiability_probe(&phi) } else { phi };
    let opts = ProveOptions {
        trace,
        ..ProveOptions::default()
    };
    let verdict = match prove_with(&target, logic, &opts) {
        Ok(v) => v,
        Err(e) => return Output::error(e.to_string()),
    };
    let mut out = match (&verdict, satisfiable) {
        (Verdict::Valid(_), false) => Output::new(EXIT_OK, "VALID\n"),
        (Verdict::Valid(_), true) => Output::new(EXIT_NEGATIVE, "UNSATISFIABLE\n"),
        (Verdict::Invalid { model, .. }, false) => Output::new(EXIT_NEGATIVE, line(model.to_json_string())),
        (Verdict::Invalid { model, world, .. }, true) => {
            let mut o = Output::new(EXIT_OK, line(model.to_json_string()));
            o.stderr = format!("satisfied at {world}\n");
            o
        }
    };
    if trace {
        out.stderr.insert_str(0, &verdict.trace().to_string());
    }
    out
}

fn check_cmd(model: &str, text: &str, world: Option<&str>, logic: Logic) -> Output {
    let m = match load_model(model) {
        Ok(m) => m,
        Err(e) => return Output::error(format!("model: {e}")),
    };
    let phi = match parse_arg(text) {
        Ok(f) => f,
        Err(o) => return o,
    };
    if let Some(w) = world {
        if !m.worlds().iter().any(|x| x == w) {
            return Output::error(format!("unknown world `{w}`"));
        }
    }
    let rows: Result<Vec<(String, String, bool)>, _> = match logic {
        Logic::KG2 => eval_kg2_all(&m, &phi).map(|rs| {
            rs.into_iter()
                .map(|r| (r.world, r.value.to_string(), r.value.pos.is_one()))
                .collect()
        }),
        Logic::KbiG => eval_kbig_all(&m, &phi).map(|vs| {
            m.worlds()
                .iter()
                .cloned()
                .zip(vs)
                .map(|(w, v)| (w, v.to_string(), v.is_one()))
                .collect()
        }),
    };
    let rows = match rows {
        Ok(r) => r,
        Err(e) => return Output::error(e.to_string()),
    };
    let mut stdout = String::new();
    let mut holds = true;
    for (w, v, one) in rows {
        if world.is_some_and(|x| x != w) {
            continue;
        }
        stdout.push_str(&format!("{w} {v}\n"));
        holds &= one;
    }
    Output::new(if holds { EXIT_OK } else { EXIT_NEGATIVE }, stdout)
}

fn oracle_cmd(text: &str, max_worlds: usize, den: Option<u32>, budget: Option<u64>) -> Output {
    let phi = match parse_arg(text) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let spec = match den {
        Some(d) => GridSpec::new(max_worlds, d, phi.variables()),
        None => GridSpec::for_formula(&phi, max_worlds),
    };
    let outcome = spec.and_then(|s| oracle_search_with_budget(&phi, &s, budget));
    match outcome {
        Ok(SearchOutcome::Countermodel { model, world }) => {
            let mut o = Output::new(EXIT_NEGATIVE, line(model.to_json_string()));
            o.stderr = format!("falsified at {world}\n");
            o
        }
        Ok(SearchOutcome::ExhaustedNoCountermodel) => Output::new(EXIT_OK, "NO COUNTERMODEL\n"),
        Ok(SearchOutcome::BudgetExceeded { tried }) => {
            Output::error(format!("inconclusive: budget exhausted after {tried} models"))
        }
        Err(e) => Output::error(e.to_string()),
    }
}
