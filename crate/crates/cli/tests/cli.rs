use std::path::Path;
use std::process::{Command, Output};

use zxmultiway::matrix::MatrixJson;
use zxmultiway::multiway::{BranchialGraph, CausalGraph, MultiwayGraph};
use zxmultiway::zx::rules::RuleInstance;

fn zxmw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zxmw")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = zxmw(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json_file<T: serde::de::DeserializeOwned>(p: &Path) -> T {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

const TOY: [&str; 8] = ["--system", "string", "--rules", "1->01,0->10", "--init", "1", "--steps", "3"];

#[test]
fn evolve_writes_dot_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let json = dir.path().join("g.json");
    let mut args = vec!["evolve"];
    args.extend(TOY);
    args.extend(["--dot", dot.to_str().unwrap(), "--json", json.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_str(&ok(&args)).unwrap();
    assert_eq!(report["graph"]["slices"], serde_json::json!([1, 1, 2, 4]));
    assert_eq!(report["config"]["rules"], "1->01,0->10");
    let g: MultiwayGraph = json_file(&json);
    assert_eq!(g.state_count(), 8);
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph multiway"));
    assert_eq!(text.matches(" -> ").count(), g.events.len());
}

#[test]
fn zero_steps_keeps_only_the_init() {
    let out = ok(&["evolve", "--system", "string", "--rules", "A->AB", "--init", "A", "--steps", "0"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["graph"]["states"], 1);
    assert_eq!(v["graph"]["events"], 0);
}

#[test]
fn artifacts_do_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for w in ["1", "4"] {
        let dot = dir.path().join(format!("{w}.dot"));
        let json = dir.path().join(format!("{w}.json"));
        ok(&[
            "evolve", "--system", "zx", "--rules", "identity", "--init",
            "X[x1,0,1,0] ⊗ Z[z1,1,2,0] ⊗ W[x1,z1] ⊗ W[z1,o1] ⊗ W[z1,o2]", "--steps", "2", "--mode", "states",
            "--workers", w, "--dot", dot.to_str().unwrap(), "--json", json.to_str().unwrap(),
        ]);
        texts.push((std::fs::read(&dot).unwrap(), std::fs::read(&json).unwrap()));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn semantics_of_a_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    ok(&["semantics", "--zx", "Z[z1,0,1,0]⊗W[z1,o1]", "--out", out.to_str().unwrap()]);
    let m: MatrixJson = json_file(&out);
    assert_eq!((m.rows, m.cols), (2, 1));
    assert_eq!(m.data, vec![vec![[1.0, 0.0]], vec![[1.0, 0.0]]]);
    assert!(m.to_matrix().is_ok());
}

#[test]
fn rule_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("rules.json");
    let out = ok(&["rules", "enumerate", "--max-in", "1", "--max-out", "1", "--json", file.to_str().unwrap()]);
    assert_eq!(out.trim(), "45 rules");
    let rules: Vec<RuleInstance> = json_file(&file);
    assert_eq!(rules.len(), 45);
    ok(&["rules", "verify", "--file", file.to_str().unwrap()]);
    let out = ok(&[
        "evolve", "--system", "zx", "--rules-file", file.to_str().unwrap(), "--init", "Z[z,0,1,0] ⊗ W[z,o1]", "--steps",
        "1",
    ]);
    assert!(out.contains("\"events\""));
    let listing = ok(&["rules", "enumerate", "--max-in", "1", "--max-out", "1"]);
    assert_eq!(listing.lines().count(), 45);
}

#[test]
fn string_rule_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    let sys = zxmultiway::frontends::StringSystem::parse("A->AB,A->BA").unwrap();
    std::fs::write(&file, serde_json::to_string(&sys).unwrap()).unwrap();
    let a = ok(&["evolve", "--system", "string", "--rules-file", file.to_str().unwrap(), "--init", "A", "--steps", "3"]);
    let b = ok(&["evolve", "--system", "string", "--rules", "A->AB,A->BA", "--init", "A", "--steps", "3"]);
    let ga: serde_json::Value = serde_json::from_str(&a).unwrap();
    let gb: serde_json::Value = serde_json::from_str(&b).unwrap();
    assert_eq!(ga["graph"], gb["graph"]);
}

#[test]
fn causal_and_branchial() {
    let dir = tempfile::tempdir().unwrap();
    let cj = dir.path().join("c.json");
    let bj = dir.path().join("b.json");
    let mut args = vec!["causal"];
    args.extend(TOY);
    args.extend(["--json", cj.to_str().unwrap()]);
    ok(&args);
    let c: CausalGraph = json_file(&cj);
    assert_eq!(c.events, 9);
    let mut args = vec!["branchial"];
    args.extend(TOY);
    args.extend(["--slice", "3", "--json", bj.to_str().unwrap()]);
    ok(&args);
    let b: BranchialGraph = json_file(&bj);
    assert_eq!(b.vertices.len(), 4);
}

#[test]
fn other_frontends() {
    ok(&["evolve", "--system", "set", "--rules", "{{x,y}}->{{x,y},{y,z}}", "--init", "{{0,0}}", "--steps", "2"]);
    ok(&["evolve", "--system", "tm", "--rules", "rulial:2,2", "--init", "1", "--steps", "2", "--mode", "states"]);
    ok(&["evolve", "--system", "term", "--rules", "f[x_,y_]->f[y_,x_]", "--init", "f[a,f[b,c]]", "--steps", "2"]);
}

#[test]
fn checks_and_experiments() {
    ok(&["check", "toy", "--rules", "1->01,0->10,1->11", "--depth", "12"]);
    ok(&[
        "check", "confluence", "--system", "set", "--rules", "{{x,y}}->{{x,y},{y,z}}", "--init", "{{0,0}}", "--steps",
        "3", "--join-depth", "3",
    ]);
    ok(&[
        "check", "invariance", "--system", "set", "--rules", "{{x,y},{z,y}}->{{x,w},{y,w},{z,w}}", "--init",
        "{{0,0},{0,0}}", "--steps", "3",
    ]);
    let q: serde_json::Value = serde_json::from_str(&ok(&["quantum", "root-not", "--steps", "8"])).unwrap();
    assert_eq!(q["faithful"], true);
    let c: serde_json::Value = serde_json::from_str(&ok(&["experiment", "completion"])).unwrap();
    assert_eq!((c["components_before"].as_u64(), c["components_after"].as_u64()), (Some(2), Some(1)));
    let m: serde_json::Value = serde_json::from_str(&ok(&["experiment", "monoidal", "--tier", "1"])).unwrap();
    assert_eq!(m["passed"], m["total"]);
    let completed: serde_json::Value = serde_json::from_str(&ok(&[
        "complete", "--system", "zx", "--rules", "identity", "--init",
        "X[x1,0,1,0] ⊗ Z[z1,1,2,0] ⊗ W[x1,z1] ⊗ W[z1,o1] ⊗ W[z1,o2]", "--init",
        "Z[z1,0,1,0] ⊗ X[x1,1,2,0] ⊗ W[z1,x1] ⊗ W[x1,o1] ⊗ W[x1,o2]", "--steps", "2", "--mode", "states",
    ]))
    .unwrap();
    assert_eq!(completed["completion"]["components_after"], 1);
}

#[test]
fn exit_codes() {
    // verdict failures
    assert_eq!(zxmw(&["check", "toy", "--rules", "1->01,0->10,01->00", "--depth", "10", "--max-len", "3"]).status.code(), Some(1));
    assert_eq!(zxmw(&["experiment", "monoidal", "--tier", "1", "--quotient", "none"]).status.code(), Some(1));
    // configuration errors
    assert_eq!(zxmw(&["evolve", "--system", "string", "--rules", "1-01", "--init", "1"]).status.code(), Some(2));
    assert_eq!(zxmw(&["evolve", "--system", "string", "--init", "1"]).status.code(), Some(2));
    assert_eq!(zxmw(&["semantics", "--zx", "Q[a]"]).status.code(), Some(2));
    // resource caps
    let capped = zxmw(&["evolve", "--system", "string", "--rules", "A->AA", "--init", "A", "--steps", "30", "--max-states", "10"]);
    assert_eq!(capped.status.code(), Some(3));
}
