use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use latentpc::format::{parse_dag, parse_kv, parse_pattern};
use latentpc::graph::MarkedGraph;
use latentpc::pc::PcTrace;
use latentpc::search::{parse_report, verify_report};
use latentpc::sem::Dataset;
use tempfile::TempDir;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/counterexample_6_1.txt");

fn latentpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latentpc"))
        .args(args)
        .env_remove("LATENTPC_JOBS")
        .output()
        .unwrap()
}

/// Runs and asserts success with a silent error stream.
fn ok(args: &[&str]) -> String {
    let o = latentpc(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stderr.is_empty(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn fails(args: &[&str], code: i32) -> String {
    let o = latentpc(args);
    assert_eq!(o.status.code(), Some(code), "{args:?}");
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(!err.trim().is_empty());
    err
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn discover_from_graphs() {
    let dir = TempDir::new().unwrap();
    let chain = write(&dir, "chain.dag", "A -> B\nB -> C\n");
    let out = ok(&["discover", "--graph", s(&chain)]);
    assert!(out.contains("A -- B") && out.contains("B -- C"), "{out}");
    parse_pattern(&out).unwrap();

    let latent = write(&dir, "latent.dag", "A -> X\nT -> X\nT -> Y\nB -> Y\nobserve A X Y B\n");
    let out = ok(&["discover", "--graph", s(&latent)]);
    assert!(out.contains("X <-> Y"), "{out}");

    let kv = parse_kv(&ok(&["discover", "--graph", s(&latent), "--format", "kv"])).unwrap();
    assert!(kv.contains(&("edge".into(), "X <-> Y".into())), "{kv:?}");
}

#[test]
fn discover_trace_replays_to_the_pattern() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.dag", "A -> C\nB -> C\nC -> D\n");
    let trace = dir.path().join("trace.txt");
    let pattern = dir.path().join("out.pat");
    ok(&["discover", "--graph", s(&g), "--trace", s(&trace), "--out", s(&pattern)]);
    let p = parse_pattern(&fs::read_to_string(&pattern).unwrap()).unwrap();
    let text = fs::read_to_string(&trace).unwrap();
    assert_eq!(text, ok(&["discover", "--graph", s(&g), "--format", "trace"]));
    assert_eq!(PcTrace::parse(&text, p.names()).unwrap().replay(p.names()).unwrap(), p);
}

#[test]
fn discover_from_simulated_data() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("d.csv");
    let graph = dir.path().join("g.dag");
    ok(&["simulate", "--vars", "4", "--samples", "3000", "--seed", "2", "--out", s(&data), "--graph-out", s(&graph)]);
    let out = ok(&["discover", "--data", s(&data), "--alpha", "0.01"]);
    let p = parse_pattern(&out).unwrap();
    let (dag, _) = parse_dag(&fs::read_to_string(&graph).unwrap()).unwrap();
    assert_eq!(p.names(), dag.names());
    fails(&["discover", "--data", s(&data), "--alpha", "0"], 64);
}

#[test]
fn query_examples() {
    let dir = TempDir::new().unwrap();
    let collider = write(&dir, "collider.dag", "A -> B\nC -> B\n");
    assert_eq!(ok(&["query", "dsep", "--graph", s(&collider), "--x", "A", "--y", "C", "--given", "B"]), "dependent\n");
    assert_eq!(ok(&["query", "dsep", "--graph", s(&collider), "--x", "A", "--y", "C"]), "separated\n");
    assert_eq!(
        ok(&["query", "dsep", "--graph", s(&collider), "--x", "A", "--y", "C", "--format", "kv"]),
        "separated=true\n"
    );

    let thm3 = write(&dir, "thm3.pat", "A -> X\nB -> X\nX -> Z\n");
    assert_eq!(
        ok(&["query", "claim", "--pattern", s(&thm3), "--from", "X", "--to", "Z"]),
        "DefiniteCause; witness: C=A, edge X->Z\n"
    );
    let kv = ok(&["query", "claim", "--pattern", s(&thm3), "--from", "X", "--to", "Z", "--rule", "thm3", "--format", "kv"]);
    let kv = parse_kv(&kv).unwrap();
    assert_eq!(kv[0], ("verdict".into(), "DefiniteCause".into()));
    assert_eq!(kv[1], ("anchor".into(), "A".into()));

    let xy = write(&dir, "xy_bidirected.pat", "X <-> Y\n");
    let out = ok(&["query", "claim", "--pattern", s(&xy), "--from", "X", "--to", "Y", "--rule", "thm2"]);
    assert!(out.starts_with("NotACause"), "{out}");
}

#[test]
fn error_statuses() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.dag", "A -> B\n");
    fails(&["query", "dsep", "--graph", s(&g), "--x", "A", "--y", "Q"], 4);
    let bad = write(&dir, "bad.dag", "A -> B\nB => C\n");
    let msg = fails(&["discover", "--graph", s(&bad)], 2);
    assert!(msg.contains("bad.dag") && msg.contains('2'), "{msg}");
    fails(&["discover", "--graph", s(&dir.path().join("missing.dag"))], 1);
    fails(&["frobnicate"], 64);
    fails(&["benchmark", "--alpha", "1.5"], 64);
    fails(&["counterexample", "--max-vertices", "4", "--max-latents", "0"], 5);
}

#[test]
fn simulate_is_deterministic_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let args = ["simulate", "--vars", "5", "--degree", "2", "--samples", "100", "--seed", "7"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let d = Dataset::read_csv(a.as_bytes()).unwrap();
    assert_eq!((d.n_columns(), d.n_samples()), (5, 100));
    let mut back = Vec::new();
    d.write_csv(&mut back).unwrap();
    assert_eq!(String::from_utf8(back).unwrap(), a);

    let graph = dir.path().join("g.dag");
    let csv = dir.path().join("d.csv");
    let mut full = args.to_vec();
    full.extend(["--out", s(&csv), "--graph-out", s(&graph)]);
    assert_eq!(ok(&full), "");
    assert_eq!(fs::read_to_string(&csv).unwrap(), a);
    let (dag, observed) = parse_dag(&fs::read_to_string(&graph).unwrap()).unwrap();
    assert_eq!(observed.len(), dag.names().len());
}

#[test]
fn benchmark_reports_rates() {
    let args = ["benchmark", "--vars", "6", "--samples", "500", "--trials", "8", "--seed", "3", "--format", "kv"];
    let kv = ok(&args);
    assert_eq!(kv, ok(&args));
    let map: std::collections::BTreeMap<_, _> = parse_kv(&kv).unwrap().into_iter().collect();
    assert_eq!(map["trials"], "8");
    for key in ["adjacency_omission", "adjacency_commission", "arrowhead_omission", "arrowhead_commission"] {
        let num: f64 = map[&format!("{key}_errors")].parse().unwrap();
        let den: f64 = map[&format!("{key}_denominator")].parse().unwrap();
        let rate: f64 = map[&format!("{key}_rate")].parse().unwrap();
        assert_eq!(rate, if den == 0.0 { 0.0 } else { num / den });
    }
    let exact = ok(&["benchmark", "--vars", "6", "--trials", "5", "--exact", "--format", "kv"]);
    assert!(exact.contains("adjacency_omission_rate=0"), "{exact}");
    let table = ok(&["benchmark", "--vars", "6", "--samples", "500", "--trials", "8", "--seed", "3", "--jobs", "1"]);
    assert!(table.contains("adjacency_omission"), "{table}");
}

#[test]
fn counterexample_verify_fixture() {
    assert_eq!(ok(&["counterexample", "--verify", FIXTURE]), "verified\n");
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(FIXTURE).unwrap();
    let bad = write(&dir, "bad.txt", &text.replacen("C -> D\n", "C -> D\nE -> D\n", 1));
    fails(&["counterexample", "--verify", s(&bad)], 3);
}

#[test]
#[ignore = "runs the full search, about 15 s in release"]
fn counterexample_search_writes_verifiable_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.txt");
    ok(&["counterexample", "--max-vertices", "6", "--max-latents", "1", "--out", s(&out)]);
    let r = parse_report(&fs::read_to_string(&out).unwrap()).unwrap();
    verify_report(&r).unwrap();
    assert_eq!(ok(&["counterexample", "--verify", s(&out)]), "verified\n");
}
