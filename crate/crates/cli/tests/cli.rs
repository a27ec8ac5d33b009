use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn fixlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fixlat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

#[test]
fn info_e8() {
    let o = fixlat(&["lattice", "info", data("e8.json").to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["format"], "fixlat-report");
    assert_eq!(v["version"], 1);
    assert_eq!(v["det"], "1");
    assert_eq!(v["minimum"], "2");
    assert_eq!(v["alpha"], 8);
    assert_eq!(v["milgram"], 0);
}

#[test]
fn info_a2() {
    let o = fixlat(&["lattice", "info", data("a2.json").to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["det"], "3");
    assert_eq!(v["minimum"], "2");
    assert_eq!(v["invariant_factors"], serde_json::json!([3]));
    assert_eq!(v["milgram"], 2);
}

#[test]
fn malformed_file_is_a_usage_error_with_position() {
    let o = fixlat(&["lattice", "info", data("malformed.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("parse error at line 2, column"), "{err}");
}

#[test]
fn missing_file_names_the_path() {
    let o = fixlat(&["lattice", "info", "/nonexistent/lattice.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/lattice.json"));
}

#[test]
fn shortvec_counts_and_vectors() {
    let o = fixlat(&["lattice", "shortvec", data("e8.json").to_str().unwrap(), "--bound", "4", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["counts"], serde_json::json!([{"norm": "2", "count": 240}, {"norm": "4", "count": 2160}]));
    let o = fixlat(&[
        "lattice",
        "shortvec",
        data("a2.json").to_str().unwrap(),
        "--bound",
        "2",
        "--vectors",
        "--format",
        "json",
    ]);
    assert_eq!(json(&o)["vectors"].as_array().unwrap().len(), 6);
}

#[test]
fn aut_and_isom() {
    let a2 = data("a2.json");
    let o = fixlat(&["lattice", "aut", a2.to_str().unwrap(), "--format", "json"]);
    assert_eq!(json(&o)["order"], "12");
    let o = fixlat(&["lattice", "isom", a2.to_str().unwrap(), a2.to_str().unwrap(), "--format", "json"]);
    assert_eq!(json(&o)["isometric"], true);
    let o = fixlat(&["lattice", "isom", a2.to_str().unwrap(), data("a1.json").to_str().unwrap(), "--format", "json"]);
    assert_eq!(json(&o)["isometric"], false);
}

#[test]
fn group_commands() {
    let g = data("weyl_a2.json");
    let o = fixlat(&["group", "order", g.to_str().unwrap()]);
    assert!(stdout(&o).contains("order 6"));
    let o = fixlat(&["group", "o2", g.to_str().unwrap(), "--seed", "3", "--format", "json"]);
    assert_eq!(json(&o)["o2_order"], "3");
    let o = fixlat(&["group", "stab", data("e8_root.json").to_str().unwrap(), "--format", "json"]);
    assert_eq!(json(&o)["order"], "51840");
}

#[test]
fn randomized_json_requires_seed() {
    let o = fixlat(&["group", "o2", data("weyl_a2.json").to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--seed is required"));
}

#[test]
fn budget_exhaustion_exits_3() {
    let o = Command::new(env!("CARGO_BIN_EXE_fixlat"))
        .args(["lattice", "aut", data("e8.json").to_str().unwrap()])
        .env("FIXLAT_NODE_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn fqs_classes_without_anti_isometry_is_named() {
    let a1 = data("a1.json");
    let o = fixlat(&["fqs", "classes", a1.to_str().unwrap(), a1.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("anti-isometry"));
}

#[test]
fn classify_e8_reports_41_orbits() {
    let dir = tempfile::tempdir().unwrap();
    let o = fixlat(&["classify", "e8", "--records", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("41 orbits"));
    assert!(!text.contains("FAIL"));
    let records: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("records.json")).unwrap()).unwrap();
    let list = records["records"].as_array().unwrap();
    assert_eq!(list.len(), 41);
    assert!(list.iter().any(|r| r["rank"] == 8 && r["group_order"] == "1"));
}

#[test]
fn classify_drop_node_matches_subdiagram_count() {
    let o = fixlat(&["classify", "e8", "--drop-node", "7", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["ok"] == true));
}

#[test]
fn json_output_is_deterministic_across_thread_counts() {
    let run = |threads: &str| {
        let o = fixlat(&["classify", "e8", "--format", "json", "--threads", threads]);
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    assert_eq!(run("1"), run("4"));
    let g = data("weyl_a2.json");
    let o2 = |_: ()| fixlat(&["group", "o2", g.to_str().unwrap(), "--seed", "11", "--format", "json"]).stdout;
    assert_eq!(o2(()), o2(()));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = fixlat(&[
        "lattice",
        "info",
        data("a2.json").to_str().unwrap(),
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["command"], "lattice info");
}

#[test]
fn element_find_writes_an_s_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fixed.json");
    let o = fixlat(&["element", "find", "--order", "3", "--rank", "6", "--fixed-out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = fixlat(&["slattice", "type", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!((v["a"].clone(), v["b"].clone(), v["rank"].clone()), (27.into(), 36.into(), 6.into()));
}

#[test]
fn leech_verify_passes() {
    let o = fixlat(&["leech", "verify", "--samples", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("norm-4 vectors: 196560"));
    assert!(text.contains("monomial group order: 1002795171840"));
}

#[test]
fn classify_run_extends_seeds() {
    let seeds = data("seeds");
    let o = fixlat(&["classify", "run", "--seeds", seeds.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("e8_a2.json: 1 records"));
    let cands = data("e8_candidates.json");
    let o = fixlat(&[
        "classify",
        "run",
        "--seeds",
        seeds.to_str().unwrap(),
        "--candidates",
        cands.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    let records = v["runs"][0]["records"].as_array().unwrap();
    assert!(records.len() > 1);
    assert!(records.iter().all(|r| r["extension_class_count"] == 1));
}

#[test]
fn classify_run_names_the_ambient_precondition() {
    let dir = tempfile::tempdir().unwrap();
    let a2 = data("a2.json");
    let seed = format!(
        r#"{{"format": "fixlat-group", "version": 1, "ambient": {{"path": "{}"}}, "generators": [[[0, 1], [-1, -1]]]}}"#,
        a2.display()
    );
    std::fs::write(dir.path().join("rotation.json"), seed).unwrap();
    let o = fixlat(&["classify", "run", "--seeds", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("even unimodular"), "{}", stderr(&o));
}
