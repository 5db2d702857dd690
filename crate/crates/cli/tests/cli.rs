use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const EXAMPLE: &str = "p pubo 5\n1 1 2 3\n1 1 4 5\n1 2 3 5\n";

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pubo-forge"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn workspace(files: &[(&str, &str)]) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in files {
        fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

#[test]
fn worked_example_needs_two_ancillas() {
    let dir = workspace(&[("ex.pubo", EXAMPLE)]);
    let o = run(
        dir.path(),
        &["compile", "ex.pubo", "--strategy", "min-ancilla"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("ancilla: 2"), "{}", stdout(&o));
    assert!(stdout(&o).contains("optimal: true"));
    assert!(dir.path().join("ex.qubo").exists());
}

#[test]
fn min_precision_triple_passes_oracle() {
    let dir = workspace(&[("ex.pubo", EXAMPLE)]);
    let o = run(
        dir.path(),
        &[
            "compile",
            "ex.pubo",
            "--strategy",
            "min-precision",
            "--gadget",
            "triple",
            "--verify",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(
        out.contains("pointwise: ok") && out.contains("ground_state: ok"),
        "{out}"
    );
    assert!(out.contains("baseline_max_introduced:"));
}

#[test]
fn every_strategy_verifies() {
    let dir = workspace(&[("ex.pubo", EXAMPLE)]);
    for strategy in ["min-ancilla", "reduce-min", "min-precision", "arbitrary"] {
        for gadget in ["single", "triple"] {
            let o = run(
                dir.path(),
                &[
                    "compile",
                    "ex.pubo",
                    "--strategy",
                    strategy,
                    "--gadget",
                    gadget,
                    "--verify",
                ],
            );
            assert_eq!(
                o.status.code(),
                Some(0),
                "{strategy} {gadget}: {}",
                stderr(&o)
            );
        }
    }
}

#[test]
fn degree_five_is_an_input_error() {
    let dir = workspace(&[("d5.pubo", "p pubo 5\n1 1 2 3 4 5\n")]);
    let o = run(dir.path(), &["compile", "d5.pubo"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("x1*x2*x3*x4*x5"), "{}", stderr(&o));
}

#[test]
fn malformed_input_and_flags_exit_two() {
    let dir = workspace(&[("bad.pubo", "p pubo 3\n1 1 x\n"), ("ex.pubo", EXAMPLE)]);
    assert_eq!(
        run(dir.path(), &["compile", "bad.pubo"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(dir.path(), &["compile", "missing.pubo"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(dir.path(), &["compile", "ex.pubo", "--strategy", "fastest"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(dir.path(), &["compile", "ex.pubo", "--emit-wcnf"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(dir.path(), &["emit-wcnf", "ex.pubo"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(dir.path(), &["bench", "--paper-fig", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn self_compiled_pair_verifies() {
    let dir = workspace(&[("ex.pubo", EXAMPLE)]);
    assert!(run(dir.path(), &["compile", "ex.pubo"]).status.success());
    let o = run(dir.path(), &["verify", "ex.pubo", "ex.qubo"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("pointwise: ok"));
}

/// Add 3 to the first coupling between two computational variables.
fn corrupt(qubo: &str) -> String {
    let n: u64 = qubo
        .lines()
        .next()
        .unwrap()
        .split_whitespace()
        .nth(3)
        .unwrap()
        .parse()
        .unwrap();
    let mut done = false;
    qubo.lines()
        .map(|line| {
            let f: Vec<&str> = line.split_whitespace().collect();
            let comp = |s: &str| s.parse::<u64>().is_ok_and(|v| v <= n);
            if !done && f.len() == 3 && f[0].parse::<i64>().is_ok() && comp(f[1]) && comp(f[2]) {
                done = true;
                format!("{} {} {}\n", f[0].parse::<i64>().unwrap() + 3, f[1], f[2])
            } else {
                format!("{line}\n")
            }
        })
        .collect()
}

#[test]
fn corrupted_coefficient_fails_with_counterexample() {
    let dir = workspace(&[("ex.pubo", EXAMPLE)]);
    assert!(run(dir.path(), &["compile", "ex.pubo"]).status.success());
    let path = dir.path().join("ex.qubo");
    let original = fs::read_to_string(&path).unwrap();
    let bad = corrupt(&original);
    assert_ne!(bad, original);
    fs::write(&path, bad).unwrap();
    let o = run(dir.path(), &["verify", "ex.pubo", "ex.qubo"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample: "), "{}", stdout(&o));

    let o = run(dir.path(), &["verify", "ex.pubo", "ex.qubo", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["passed"], Value::Bool(false));
    assert!(v["counterexample"].as_str().is_some_and(|s| s.len() == 5));
}

#[test]
fn thirty_variables_exceed_cap() {
    let mut pubo = String::from("p pubo 30\n");
    for i in (1..=28).step_by(3) {
        pubo.push_str(&format!("2 {} {} {}\n", i, i + 1, i + 2));
    }
    let dir = workspace(&[("big.pubo", &pubo)]);
    let o = run(dir.path(), &["compile", "big.pubo"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(dir.path(), &["verify", "big.pubo", "big.qubo"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert_eq!(
        run(dir.path(), &["compile", "big.pubo", "--verify"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn json_summary_is_flat() {
    let dir = workspace(&[("ex.pubo", EXAMPLE)]);
    let o = run(
        dir.path(),
        &["compile", "ex.pubo", "--json", "--verify", "-o", "out.qubo"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let obj = v.as_object().unwrap();
    assert!(obj.values().all(|x| !x.is_object() && !x.is_array()));
    assert_eq!(obj["ancilla"], 2);
    assert_eq!(obj["verified"], true);
    assert_eq!(obj["output"], "out.qubo");
}

#[test]
fn quartic_pipeline_with_external_model() {
    let dir = workspace(&[("q.pubo", "p pubo 5\n3 1 2 3 4\n-2 2 3 4 5\n")]);
    let o = run(
        dir.path(),
        &["compile", "q.pubo", "--emit", "wcnf", "--verify"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("ancilla: 2"));
    let wcnf = fs::read_to_string(dir.path().join("q.wcnf")).unwrap();
    assert!(wcnf.contains("p wcnf"));

    // r_{2,3} and r_{2,3,4} via the pair: a three-ancilla model that reduces both terms
    let var = |name: &str| {
        wcnf.lines()
            .find_map(|l| l.strip_suffix(name).and_then(|r| r.strip_prefix("c var ")))
            .map(|v| v.trim().to_string())
            .unwrap()
    };
    let model = format!(
        "v {} {} {} 0\n",
        var(" r 2 3"),
        var(" r 1 4"),
        var(" r 4 5")
    );
    fs::write(dir.path().join("model.txt"), model).unwrap();
    let o = run(
        dir.path(),
        &[
            "compile",
            "q.pubo",
            "--wmaxsat-model",
            "model.txt",
            "--verify",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("ancilla: 3"), "{}", stdout(&o));

    fs::write(dir.path().join("empty.txt"), "v 0\n").unwrap();
    let o = run(
        dir.path(),
        &["compile", "q.pubo", "--wmaxsat-model", "empty.txt"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn emit_wcnf_and_lp() {
    let dir = workspace(&[("q.pubo", "p pubo 4\n1 1 2 3 4\n"), ("ex.pubo", EXAMPLE)]);
    let o = run(dir.path(), &["emit-wcnf", "q.pubo"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("p wcnf 10 22 11"));
    let o = run(dir.path(), &["compile", "ex.pubo", "--emit-lp"]);
    assert_eq!(o.status.code(), Some(0));
    let lp = fs::read_to_string(dir.path().join("ex.lp")).unwrap();
    assert!(lp.contains("min:") && lp.contains("binary"), "{lp}");
}

#[test]
fn stats_reports_counts() {
    let dir = workspace(&[("ex.pubo", EXAMPLE)]);
    let o = run(dir.path(), &["stats", "ex.pubo", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["cubic_terms"], 3);
    assert_eq!(v["control_precision"], 1);
    assert_eq!(v["cubic_ancilla_bound"], 4);
}

fn csv_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn bench_default_and_determinism() {
    let dir = workspace(&[]);
    let o = run(dir.path(), &["bench"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = stdout(&o);
    let rows = csv_rows(&first);
    assert!(rows[0].starts_with("n,lambda,strategy,gadget,"));
    assert!(rows.len() >= 2);
    assert_eq!(stdout(&run(dir.path(), &["bench"])), first);

    let args = [
        "bench",
        "--paper-fig",
        "3",
        "--lambdas",
        "10,20",
        "--instances",
        "4",
        "-o",
        "a.csv",
    ];
    assert!(run(dir.path(), &args).status.success());
    let mut args2 = args;
    args2[8] = "b.csv";
    assert!(run(dir.path(), &args2).status.success());
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("threshold_pct=100"));
    assert!(csv_rows(&text)
        .iter()
        .any(|r| r.starts_with("11,10,greedy,triple,")));
}

#[test]
fn bench_config_file_and_presets() {
    let dir = workspace(&[("sweep.cfg", "# small\nn=5\nlambdas=1,10\ninstances=3\n")]);
    let o = run(
        dir.path(),
        &["bench", "--paper-fig", "1", "--config", "sweep.cfg"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(
        csv_rows(&out)
            .iter()
            .any(|r| r.starts_with("5,10,ilp,single,4.0000,")),
        "{out}"
    );
    let o = run(
        dir.path(),
        &[
            "bench",
            "--paper-fig",
            "1",
            "--instances",
            "2",
            "--lambdas",
            "56",
        ],
    );
    assert!(csv_rows(&stdout(&o))
        .iter()
        .any(|r| r.starts_with("8,56,ilp,single,12.0000,")));
    let o = run(dir.path(), &["bench", "--set", "speed=1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_path_defaults_next_to_input() {
    let dir = workspace(&[]);
    fs::create_dir(dir.path().join("sub")).unwrap();
    fs::write(dir.path().join("sub/ex.pubo"), EXAMPLE).unwrap();
    assert!(run(dir.path(), &["compile", "sub/ex.pubo"])
        .status
        .success());
    assert!(PathBuf::from(dir.path()).join("sub/ex.qubo").exists());
}
