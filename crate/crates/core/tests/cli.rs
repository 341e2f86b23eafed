use std::path::{Path, PathBuf};
use std::process::Command;

use graphmonoid::cli::{run, Outcome, EXIT_BUDGET, EXIT_INVALID, EXIT_OK};
use serde_json::{json, Value};
use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: TempDir::new().unwrap(),
        }
    }

    fn file(&self, name: &str, doc: &Value) -> String {
        self.raw(name, &doc.to_string())
    }

    fn raw(&self, name: &str, text: &str) -> String {
        let path: PathBuf = self.dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path.to_string_lossy().into_owned()
    }
}

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("graphmonoid").chain(args.iter().copied()))
}

fn stdout_json(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

fn vertex(v: &str, mult: u64) -> Value {
    json!({"terms": [{"gen": {"kind": "v", "v": v}, "mult": mult}]})
}

fn path_graph() -> Value {
    json!({
        "vertices": ["v", "w", "u"],
        "edges": [{"id": "e", "src": "v", "dst": "w"}, {"id": "f", "src": "w", "dst": "u"}]
    })
}

fn diamond() -> Value {
    json!({
        "vertices": ["a", "b", "c", "s", "t"],
        "edges": [
            {"id": "e1", "src": "a", "dst": "b"},
            {"id": "e2", "src": "a", "dst": "c"},
            {"id": "e3", "src": "b", "dst": "s"},
            {"id": "e4", "src": "c", "dst": "s"},
            {"id": "e5", "src": "c", "dst": "t"}
        ]
    })
}

fn emitter_graph(materialized: usize) -> Value {
    json!({
        "vertices": ["v", "w"],
        "infinite_emitters": {"v": {"prefix": [], "cycle": ["w"], "materialized": materialized}}
    })
}

#[test]
fn equal_prints_decision_and_certificate() {
    let ws = Workspace::new();
    let g = ws.file("g.json", &path_graph());
    let x = ws.file("x.json", &vertex("v", 1));
    let y = ws.file("y.json", &vertex("u", 1));
    let out = cli(&["equal", "--graph", &g, "--lhs", &x, "--rhs", &y]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let doc = stdout_json(&out);
    assert_eq!(doc["equal"], json!(true));
    assert!(doc["certificate"].is_object());
}

#[test]
fn unequal_elements_still_exit_zero() {
    let ws = Workspace::new();
    let g = ws.file("g.json", &diamond());
    let x = ws.file("x.json", &vertex("a", 1));
    let y = ws.file("y.json", &vertex("s", 2));
    let out = cli(&["equal", "--graph", &g, "--lhs", &x, "--rhs", &y]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(stdout_json(&out)["equal"], json!(false));
}

#[test]
fn inline_elements_are_accepted() {
    let ws = Workspace::new();
    let g = ws.file("g.json", &path_graph());
    let nf = |x: Value| {
        cli(&[
            "normal-form",
            "--graph",
            &g,
            "--element",
            &x.to_string(),
            "--format",
            "text",
        ])
    };
    let from_w = nf(vertex("w", 2));
    assert_eq!(from_w.code, EXIT_OK, "{}", from_w.stderr);
    assert_eq!(from_w, nf(vertex("u", 2)));
    assert_ne!(from_w, nf(vertex("u", 1)));
}

#[test]
fn oracle_check_reports_agreements() {
    let ws = Workspace::new();
    let g = ws.file("dag.json", &diamond());
    let out = cli(&[
        "oracle-check",
        "--graph",
        &g,
        "--samples",
        "50",
        "--seed",
        "7",
    ]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_eq!(
        stdout_json(&out),
        json!({"agreements": 50, "discrepancies": 0})
    );
}

#[test]
fn oracle_check_is_byte_identical_per_seed() {
    let ws = Workspace::new();
    let g = ws.file("dag.json", &diamond());
    let first = cli(&[
        "oracle-check",
        "--graph",
        &g,
        "--samples",
        "30",
        "--seed",
        "3",
    ]);
    let second = cli(&[
        "oracle-check",
        "--graph",
        &g,
        "--samples",
        "30",
        "--seed",
        "3",
    ]);
    assert_eq!(first, second);
}

#[test]
fn oracle_check_rejects_cycles() {
    let ws = Workspace::new();
    let g = ws.file(
        "loop.json",
        &json!({"vertices": ["v"], "edges": [{"id": "e", "src": "v", "dst": "v"}]}),
    );
    let out = cli(&["oracle-check", "--graph", &g]);
    assert_eq!(out.code, EXIT_INVALID);
    assert!(out.stderr.contains("cycle"), "{}", out.stderr);
}

#[test]
fn desingularize_marks_the_boundary() {
    let ws = Workspace::new();
    let g = ws.file("g.json", &emitter_graph(2));
    let out = cli(&["desingularize", "--graph", &g, "--level", "3"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let doc = stdout_json(&out);
    let boundary: Vec<&Value> = doc["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["boundary"] == json!(true))
        .collect();
    assert!(!boundary.is_empty());
    assert!(doc["infinite_emitters"].as_object().unwrap().is_empty());
}

#[test]
fn phi_reports_required_level() {
    let ws = Workspace::new();
    let g = ws.file("g.json", &emitter_graph(3));
    let x = ws.file(
        "x.json",
        &json!({"terms": [{"gen": {"kind": "vS", "v": "v", "S": ["e0^v", "e1^v", "e2^v"]}, "mult": 1}]}),
    );
    let out = cli(&["phi", "--graph", &g, "--element", &x, "--level", "2"]);
    assert_eq!(out.code, EXIT_INVALID);
    assert!(out.stderr.contains("level 4 is required"), "{}", out.stderr);

    let out = cli(&["phi", "--graph", &g, "--element", &x]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_eq!(stdout_json(&out)["level"], json!(4));
}

#[test]
fn phi_then_psi_round_trips() {
    let ws = Workspace::new();
    let g = ws.file("g.json", &emitter_graph(2));
    let x = ws.file("x.json", &vertex("v", 2));
    let out = cli(&["phi", "--graph", &g, "--element", &x, "--level", "3"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let image = ws.file("image.json", &stdout_json(&out)["image"]);
    let back = cli(&["psi", "--graph", &g, "--element", &image, "--level", "3"]);
    assert_eq!(back.code, EXIT_OK, "{}", back.stderr);
    assert_eq!(stdout_json(&back)["image"], vertex("v", 2));
}

#[test]
fn ck_check_and_induced_map() {
    let ws = Workspace::new();
    let source = ws.file("e.json", &emitter_graph(1));
    let target = ws.file("f.json", &emitter_graph(2));
    let m = ws.file(
        "m.json",
        &json!({"vertex_map": {"v": "v", "w": "w"}, "edge_map": {"e0^v": "e0^v"}}),
    );
    let out = cli(&[
        "ck-check",
        "--source",
        &source,
        "--target",
        &target,
        "--morphism",
        &m,
    ]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_eq!(stdout_json(&out)["is_ck"], json!(true));

    let out = cli(&[
        "induced-map",
        "--source",
        &source,
        "--target",
        &target,
        "--morphism",
        &m,
    ]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let entries = stdout_json(&out)["map"].as_array().unwrap().len();
    assert_eq!(entries, 3);
}

#[test]
fn ck_check_lists_violations() {
    let ws = Workspace::new();
    let e = json!({"vertices": ["v", "w"], "edges": [{"id": "e", "src": "v", "dst": "w"}]});
    let f = json!({
        "vertices": ["v", "w", "x"],
        "edges": [{"id": "e", "src": "v", "dst": "w"}, {"id": "e2", "src": "v", "dst": "x"}]
    });
    let source = ws.file("e.json", &e);
    let target = ws.file("f.json", &f);
    let m = ws.file(
        "m.json",
        &json!({"vertex_map": {"v": "v", "w": "w"}, "edge_map": {"e": "e"}}),
    );
    let out = cli(&[
        "ck-check",
        "--source",
        &source,
        "--target",
        &target,
        "--morphism",
        &m,
    ]);
    assert_eq!(out.code, EXIT_OK);
    let doc = stdout_json(&out);
    assert_eq!(doc["is_ck"], json!(false));
    assert_eq!(doc["violations"][0]["kind"], json!("not_bijective"));

    let out = cli(&[
        "induced-map",
        "--source",
        &source,
        "--target",
        &target,
        "--morphism",
        &m,
    ]);
    assert_eq!(out.code, EXIT_INVALID);
}

fn emitter_system(counts: &[usize]) -> Value {
    let graphs: Vec<Value> = counts.iter().map(|&k| emitter_graph(k)).collect();
    let morphisms: Vec<Value> = counts
        .windows(2)
        .map(|w| {
            let edges: serde_json::Map<String, Value> = (0..w[0])
                .map(|i| (format!("e{i}^v"), json!(format!("e{i}^v"))))
                .collect();
            json!({"vertex_map": {"v": "v", "w": "w"}, "edge_map": edges})
        })
        .collect();
    json!({"graphs": graphs, "morphisms": morphisms})
}

#[test]
fn colimit_and_continuity() {
    let ws = Workspace::new();
    let system = ws.file("system.json", &emitter_system(&[0, 1, 2]));
    let out = cli(&["colimit", "--system", &system]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let doc = stdout_json(&out);
    assert_eq!(doc["injections"].as_array().unwrap().len(), 3);

    let out = cli(&["continuity-check", "--system", &system, "--max-degree", "2"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let doc = stdout_json(&out);
    assert_eq!(doc["compatible"], json!(true));
    assert_eq!(doc["counterexamples"], json!([]));
}

#[test]
fn incoherent_system_is_invalid_input() {
    let ws = Workspace::new();
    let mut doc = emitter_system(&[0, 1]);
    doc["morphisms"] = json!([]);
    let system = ws.file("system.json", &doc);
    let out = cli(&["colimit", "--system", &system]);
    assert_eq!(out.code, EXIT_INVALID);
}

#[test]
fn malformed_json_reports_location() {
    let ws = Workspace::new();
    let g = ws.raw("bad.json", "{\"vertices\": [\"v\",\n  ]}");
    let out = cli(&["present", "--graph", &g]);
    assert_eq!(out.code, EXIT_INVALID);
    assert!(out.stderr.contains("bad.json"), "{}", out.stderr);
    assert!(out.stderr.contains("line 2 column"), "{}", out.stderr);
}

#[test]
fn missing_file_and_unknown_flag_are_invalid() {
    let out = cli(&["present", "--graph", "/definitely/not/here.json"]);
    assert_eq!(out.code, EXIT_INVALID);
    let out = cli(&["present", "--graph", "g.json", "--frobnicate"]);
    assert_eq!(out.code, EXIT_INVALID);
    assert!(out.stderr.contains("--frobnicate"));
}

#[test]
fn validate_reports_problems_without_failing() {
    let ws = Workspace::new();
    let g = ws.file(
        "g.json",
        &json!({"vertices": ["v"], "edges": [{"id": "e", "src": "v", "dst": "nowhere"}]}),
    );
    let out = cli(&["validate", "--graph", &g]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let doc = stdout_json(&out);
    assert_eq!(doc["valid"], json!(false));
    assert!(!doc["violations"].as_array().unwrap().is_empty());
}

#[test]
fn exhausted_budget_exits_three() {
    let ws = Workspace::new();
    let g = ws.file("g.json", &emitter_graph(2));
    let x = ws.file("x.json", &vertex("v", 1));
    let out = cli(&[
        "normal-form",
        "--graph",
        &g,
        "--element",
        &x,
        "--budget",
        "0",
    ]);
    assert_eq!(out.code, EXIT_BUDGET, "{}", out.stdout);
    assert!(out.stderr.contains("budget"));
}

#[test]
fn present_lists_relations() {
    let ws = Workspace::new();
    let g = ws.file("g.json", &path_graph());
    let out = cli(&["present", "--graph", &g]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let doc = stdout_json(&out);
    assert_eq!(doc["generators"].as_array().unwrap().len(), 3);
    assert_eq!(doc["relations"].as_array().unwrap().len(), 2);
}

#[test]
fn binary_exit_codes() {
    let ws = Workspace::new();
    let g = ws.file("g.json", &path_graph());
    let bin = Path::new(env!("CARGO_BIN_EXE_graphmonoid"));
    let ok = Command::new(bin)
        .args(["validate", "--graph", &g])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("\"valid\": true"));
    let bad = Command::new(bin).args(["validate"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
