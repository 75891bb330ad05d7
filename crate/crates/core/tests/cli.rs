//! The `kg2` binary end to end.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn kg2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kg2")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn documented_examples() {
    assert_eq!(kg2(&["prove", "1 -< <>((p -< q) & q)"]).status.code(), Some(0));

    let o = kg2(&["prove", "[]p -> [][]p"]);
    assert_eq!(o.status.code(), Some(1));
    let model: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(model["worlds"].as_array().unwrap().len(), 3);

    let o = kg2(&["prove", "--satisfiable", "Dn([]p -> []q) & ~Dn([]q -> []p)"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn prove_output_feeds_check() {
    for formula in ["[]p -> [][]p", "(p & !p) -> q", "Dn(p->q) | Dn(q->p)", "<>(p & !p) -> <>q"] {
        let o = kg2(&["prove", formula]);
        assert_eq!(o.status.code(), Some(1), "{formula}");
        let dir = std::env::temp_dir().join(format!("kg2-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("model.json");
        std::fs::File::create(&path).unwrap().write_all(&o.stdout).unwrap();
        let c = kg2(&["check", "--model", path.to_str().unwrap(), "--formula", formula]);
        assert_eq!(c.status.code(), Some(1), "{formula}: {}", stdout(&c));
    }
}

#[test]
fn check_reports_each_world() {
    let model = r#"{"worlds":["a","b"],"relation":[["a","b"]],"valuation":{"a":{"p":"1/2"},"b":{"p":["1","1/3"]}}}"#;
    let o = kg2(&["check", "--model", model, "--formula", "[]p"]);
    assert_eq!(stdout(&o), "a (1, 1/3)\nb (1, 0)\n");
    assert_eq!(o.status.code(), Some(0));
    let o = kg2(&["check", "--model", model, "--formula", "p", "--logic", "kbig", "--world", "a"]);
    assert_eq!(stdout(&o), "a 1/2\n");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn errors_exit_two() {
    let o = kg2(&["prove", "p -> (q"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("offset"));
    assert_eq!(kg2(&["check", "--model", "{\"worlds\":[]}", "--formula", "p"]).status.code(), Some(2));
    assert_eq!(kg2(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(kg2(&["oracle", "p -> (q -> p)", "--budget", "3"]).status.code(), Some(2));
}

#[test]
fn fuzz_is_deterministic() {
    let run = || {
        let mut c = Command::new(env!("CARGO_BIN_EXE_kg2"));
        c.args(["fuzz", "--n", "30", "--seed", "7", "--json", "--max-worlds", "2", "--den", "8"]);
        c.stdout(Stdio::piped()).output().unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["total"], 30);
}
