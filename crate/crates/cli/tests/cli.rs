use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn zeno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeno")).args(args).env_remove("ZENO_THREADS").output().unwrap()
}

fn zeno_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_zeno"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zeno-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const XOR: &str = "p cnf 2 2\n-1 -2 0\n1 2 0\n";
const UNSAT: &str = "p cnf 1 2\n1 0\n-1 0\n";

#[test]
fn gen_sat_is_deterministic_dimacs() {
    let a = zeno(&["gen-sat", "--n", "8", "--m", "32", "--seed", "5"]);
    let b = zeno(&["gen-sat", "--n", "8", "--m", "32", "--seed", "5"]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.lines().any(|l| l == "p cnf 8 32"), "{text}");
    let clauses = text.lines().filter(|l| !l.starts_with('c') && !l.starts_with('p')).count();
    assert_eq!(clauses, 32);
    let c = zeno(&["gen-sat", "--n", "8", "--m", "32", "--seed", "6"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gen_coord_writes_graph_and_formula() {
    let dir = scratch("coord");
    let graph = dir.join("g.txt");
    let cnf = dir.join("f.cnf");
    let o = zeno(&[
        "gen-coord", "--n", "6", "--p", "0.5", "--seed", "3",
        "--graph-out", graph.to_str().unwrap(), "--out", cnf.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = std::fs::read_to_string(&graph).unwrap();
    assert_eq!(g.lines().next(), Some("6"));
    assert!(g.lines().skip(1).all(|l| l.split(' ').count() == 2), "{g}");
    let f = std::fs::read_to_string(&cnf).unwrap();
    assert!(f.lines().any(|l| l.starts_with("p cnf 6 ")), "{f}");
    // Not-all-equal clauses come in complementary pairs.
    let clauses = f.lines().filter(|l| !l.starts_with('c') && !l.starts_with('p')).count();
    assert_eq!(clauses % 2, 0);
}

#[test]
fn models_from_stdin() {
    let o = zeno_stdin(&["models", "--list"], XOR);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains('2'), "{text}");
    let o = zeno_stdin(&["--json", "models", "--k", "1"], XOR);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["count"], 3);
}

#[test]
fn reduce_reports_dimension() {
    let o = zeno_stdin(&["--json", "reduce"], XOR);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["reduced"]["d"], 2);
}

#[test]
fn simulate_json_is_reproducible_and_normalized() {
    let dir = scratch("sim");
    let cnf = dir.join("f.cnf");
    let o = zeno(&["gen-sat", "--n", "6", "--m", "24", "--seed", "1", "--out", cnf.to_str().unwrap()]);
    assert!(o.status.success());
    let args = ["--json", "simulate", "--input", cnf.to_str().unwrap(), "--k-ratio", "0.5", "--schedule", "2:3,1:1"];
    let a = zeno(&args);
    let b = zeno(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["nu"], 7);
    let total = v["reduced_norm_sq"].as_f64().unwrap() + v["residual_norm_sq"].as_f64().unwrap();
    assert!((total - 1.0).abs() < 1e-10, "{total}");
}

#[test]
fn simulate_matches_full_reference() {
    let o = zeno_stdin(&["simulate", "--schedule", "3:2", "--reference"], XOR);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = zeno_stdin(&["--json", "simulate", "--schedule", "3:2", "--reference"], XOR);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let err = v["reference_max_error"].as_f64().expect("reference_max_error field");
    assert!(err < 1e-9, "{err}");
}

#[test]
fn simulate_unsat_prefix_exits_3() {
    let o = zeno_stdin(&["simulate", "--k", "2"], UNSAT);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("k = 2"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    assert_eq!(zeno(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(zeno(&["gen-sat", "--n", "3"]).status.code(), Some(1));
    assert_eq!(zeno_stdin(&["simulate", "--schedule", "0:0"], XOR).status.code(), Some(1));
    assert_eq!(zeno(&["models", "--input", "/nonexistent/file.cnf"]).status.code(), Some(1));
    let help = zeno(&["simulate", "--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = stdout(&help);
    for flag in ["--schedule", "--delta", "--initial", "--shots", "--reference", "[default: 1:1]"] {
        assert!(text.contains(flag), "missing {flag}:\n{text}");
    }
}

#[test]
fn shots_are_seeded() {
    let args = ["--json", "simulate", "--schedule", "1:1", "--shots", "200", "--seed", "9"];
    let a = zeno_stdin(&args, XOR);
    let b = zeno_stdin(&args, XOR);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_passes() {
    let o = zeno(&["verify", "--cases", "10", "--seed", "4", "--max-n", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let o = zeno(&["--json", "verify", "--cases", "5", "--seed", "4", "--max-n", "5", "--suite", "schedule"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn bench_table_from_config_is_byte_identical() {
    let dir = scratch("table");
    let cfg = dir.join("t.toml");
    std::fs::write(
        &cfg,
        "benchmark = \"random3sat\"\nn_range = [6, 7]\ncolumns = [4.0]\nk_ratios = [0.5, 0.8]\ninstances = 5\nseed = 2\nformat = \"csv\"\n",
    )
    .unwrap();
    let a = zeno(&["bench-table", "--config", cfg.to_str().unwrap()]);
    let b = zeno(&["--threads", "1", "bench-table", "--config", cfg.to_str().unwrap()]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 3, "{text}");
    assert!(text.starts_with("n,2^n,"), "{text}");

    std::fs::write(&cfg, "bogus_key = 1\n").unwrap();
    assert_eq!(zeno(&["bench-table", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn bench_time_small() {
    let o = zeno(&[
        "--json", "bench-time", "--n", "5,6", "--schedule", "2:2", "--repeats", "1", "--seed", "1",
        "--full-max-n", "6",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn threads_env_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_zeno"))
        .args(["verify", "--cases", "2", "--seed", "1", "--max-n", "4"])
        .env("ZENO_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
