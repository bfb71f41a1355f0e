use std::path::PathBuf;
use std::process::{Command, Output};

use plantgraph_core::{DiagnosisReport, PlantGraph};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn plantgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plantgraph"))
        .args(args)
        .output()
        .unwrap()
}

fn report(out: &Output) -> DiagnosisReport {
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    DiagnosisReport::from_json(&String::from_utf8(out.stdout.clone()).unwrap()).unwrap()
}

#[test]
fn simulate_node_two_case() {
    let out = plantgraph(&[
        "simulate",
        "--graph",
        &fixture("fixture_l.json"),
        "--perturb",
        "2",
        "--state",
        "all-true",
        "--switch",
        "S1=false,S2=false",
    ]);
    let r = report(&out);
    assert_eq!(r.chosen_state.s_tot, 3.0);
    assert_eq!(r.post.service.per_user["10"], 1.0);
    assert_eq!(r.mode, "fixed-state");
}

#[test]
fn optimize_perturb_one() {
    let out = plantgraph(&[
        "optimize",
        "--graph",
        &fixture("fixture_l.json"),
        "--perturb",
        "1",
        "--seed",
        "7",
        "--npop",
        "400",
        "--ngen",
        "200",
        "--indpb",
        "0.7",
        "--tresh",
        "0.4",
        "--nsel",
        "100",
    ]);
    let r = report(&out);
    assert_eq!(r.chosen_state.fitness, -25.0);
    assert_eq!(r.flipped, vec!["S1".to_string()]);
    assert_eq!(r.ga_log.len(), 201);
}

#[test]
fn optimize_exhaustive_text() {
    let out = plantgraph(&[
        "optimize",
        "--graph",
        &fixture("fixture_l.json"),
        "--perturb",
        "2,3",
        "--exhaustive",
        "--format",
        "text",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("-23"), "{text}");
}

#[test]
fn unknown_flag_exits_one_with_usage() {
    let out = plantgraph(&[
        "simulate",
        "--graph",
        &fixture("fixture_t.json"),
        "--perturb",
        "1",
        "--bogus",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(plantgraph(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = plantgraph(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("simulate"));
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"nodes": [{"id": "a", "role": "HUB", "area": "x", "passive_resistant": false}], "edges": [{"from": "a", "to": "zz", "weight": 1, "logic": "SINGLE"}]}"#).unwrap();
    let out = plantgraph(&["validate", "--graph", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zz"));

    let out = plantgraph(&["simulate", "--graph", &fixture("fixture_l.json"), "--perturb", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    let out = plantgraph(&[
        "simulate",
        "--graph",
        &fixture("fixture_l.json"),
        "--perturb",
        "1",
        "--switch",
        "S1=maybe",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_file_is_runtime_error() {
    let out = plantgraph(&["validate", "--graph", "/nonexistent/plant.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_and_measures() {
    let out = plantgraph(&["validate", "--graph", &fixture("fixture_t.json")]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["nodes"], 5);
    assert_eq!(summary["switches"], serde_json::json!(["2", "3"]));

    let out = plantgraph(&[
        "measures",
        "--graph",
        &fixture("fixture_l.json"),
        "--algorithm",
        "floyd-warshall",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(m["algorithm"], "floyd-warshall");
    assert_eq!(m["service"]["per_user"]["12"], 0.6);
}

#[test]
fn report_written_to_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = plantgraph(&[
        "simulate",
        "--graph",
        &fixture("fixture_t.json"),
        "--perturb",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r = DiagnosisReport::from_json(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r.post.propagation.broken, vec!["1", "2", "3", "18"]);
}

#[test]
fn generate_is_deterministic() {
    let args = [
        "generate",
        "--n",
        "50",
        "--seed",
        "3",
        "--switch-pct",
        "0.5",
        "--or-fraction",
        "0.3",
    ];
    let a = plantgraph(&args);
    let b = plantgraph(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let g = PlantGraph::load(&String::from_utf8(a.stdout).unwrap()).unwrap();
    assert_eq!(g.node_count(), 50);
}

#[test]
fn generate_levels_need_out_dir() {
    let out = plantgraph(&["generate", "--n", "30", "--switch-pct", "0.1,0.5"]);
    assert_eq!(out.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let recipe = dir.path().join("recipe.json");
    std::fs::write(&recipe, r#"{"n": 30, "seed": 2, "switch_percentages": [0.1, 0.5]}"#).unwrap();
    let out = plantgraph(&[
        "generate",
        "--recipe",
        recipe.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let files: Vec<&str> = std::str::from_utf8(&out.stdout).unwrap().lines().collect();
    assert_eq!(files.len(), 2);
    let small = PlantGraph::load(&std::fs::read_to_string(files[0]).unwrap()).unwrap();
    let large = PlantGraph::load(&std::fs::read_to_string(files[1]).unwrap()).unwrap();
    assert!(small.switches().len() <= large.switches().len());
}
