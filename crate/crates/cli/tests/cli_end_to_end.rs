//! Drive the installed binary end to end: deterministic generation, solve
//! pipelines per instance kind, witness analysis, and exit codes.

use std::process::Command;

fn augur() -> Command {
    Command::new(env!("CARGO_BIN_EXE_augur"))
}

fn run_ok(args: &[&str]) -> String {
    let out = augur().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "augur {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

#[test]
fn generation_is_byte_stable() {
    let a = run_ok(&["generate", "--kind", "random-tree", "--n", "50", "--seed", "7"]);
    let b = run_ok(&["generate", "--kind", "random-tree", "--n", "50", "--seed", "7"]);
    assert_eq!(a, b);
    assert!(!a.is_empty());
}

#[test]
fn five_layer_sizes() {
    let text = run_ok(&["generate", "--kind", "five-layer"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let nodes = v["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 235 + 360);
    assert_eq!(v["terminals"].as_array().unwrap().len(), 360);
}

#[test]
fn solve_one_node_cap_reports_feasible_json() {
    let dir = std::env::temp_dir().join("augur-cli-test-onc");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("inst.json");
    let text = run_ok(&[
        "generate",
        "--kind",
        "random-one-node-cap",
        "--n",
        "8",
        "--links",
        "7",
        "--seed",
        "31",
    ]);
    std::fs::write(&path, text).unwrap();
    let rep = run_ok(&[
        "solve",
        "--input",
        path.to_str().unwrap(),
        "--k",
        "4",
        "--seed",
        "9",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&rep).unwrap();
    assert_eq!(v["feasible"], true);
    assert!(v["cost"].as_u64().unwrap() >= v["opt"].as_u64().unwrap());
}

#[test]
fn witness_five_layer_golden_checks_pass() {
    let dir = std::env::temp_dir().join("augur-cli-test-5l");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("five.json");
    let text = run_ok(&["generate", "--kind", "five-layer"]);
    std::fs::write(&path, text).unwrap();
    let rep = run_ok(&[
        "witness",
        "--input",
        path.to_str().unwrap(),
        "--root",
        "z2.2.2",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&rep).unwrap();
    assert_eq!(v["h_average"]["numerator"], "44773319");
    assert_eq!(v["h_average"]["denominator"], "24195600");
    assert_eq!(v["audit"]["holds"], true);
}

#[test]
fn trivially_biconnected_input_solves_to_empty() {
    // A one-node-cap file whose base graph is already 2-node-connected.
    let file = serde_json::json!({
        "format_version": 1,
        "kind": "one-node-cap",
        "nodes": (0..4).map(|id| serde_json::json!({
            "id": id, "label": format!("n{id}"), "role": "plain"
        })).collect::<Vec<_>>(),
        "edges": [[0,1],[1,2],[2,3],[3,0]],
        "links": [[0,2]],
        "terminals": [],
        "metadata": {}
    });
    let dir = std::env::temp_dir().join("augur-cli-test-triv");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cycle.json");
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let rep = run_ok(&["solve", "--input", path.to_str().unwrap(), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&rep).unwrap();
    assert_eq!(v["trivial"], true);
    assert_eq!(v["cost"], 0);
    assert_eq!(v["feasible"], true);
}

#[test]
fn malformed_input_exits_one_and_bad_flags_exit_two() {
    let out = augur()
        .args(["solve", "--input", "/nonexistent/x.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = augur().args(["generate", "--kind", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = augur().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn env_seed_is_honored() {
    let with_env = augur()
        .args(["generate", "--kind", "random-tree", "--n", "9"])
        .env("AUGUR_SEED", "123")
        .output()
        .unwrap();
    let with_flag = run_ok(&[
        "generate",
        "--kind",
        "random-tree",
        "--n",
        "9",
        "--seed",
        "123",
    ]);
    assert_eq!(String::from_utf8(with_env.stdout).unwrap(), with_flag);
}

#[test]
fn verify_structural_suite_passes() {
    let rep = run_ok(&["verify", "--suite", "structural", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&rep).unwrap();
    assert_eq!(v["all_passed"], true);
}

#[test]
fn verify_jobs_do_not_change_output() {
    let one = run_ok(&[
        "verify", "--suite", "krestricted", "--trials", "8", "--seed", "4", "--jobs", "1", "--json",
    ]);
    let four = run_ok(&[
        "verify", "--suite", "krestricted", "--trials", "8", "--seed", "4", "--jobs", "4", "--json",
    ]);
    // Timing fields differ; the verdicts and details must not.
    let a: serde_json::Value = serde_json::from_str(&one).unwrap();
    let b: serde_json::Value = serde_json::from_str(&four).unwrap();
    assert_eq!(a["suites"][0]["passed"], b["suites"][0]["passed"]);
    assert_eq!(a["suites"][0]["details"], b["suites"][0]["details"]);
}

#[test]
fn witness_csv_emission() {
    let dir = std::env::temp_dir().join("augur-cli-test-csv");
    std::fs::create_dir_all(&dir).unwrap();
    let inst = dir.join("p4.json");
    let csv = dir.join("w.csv");
    let text = run_ok(&["generate", "--kind", "path-family", "--t", "4"]);
    std::fs::write(&inst, text).unwrap();
    run_ok(&[
        "witness",
        "--input",
        inst.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("node,label,w,h_w"));
    assert_eq!(body.lines().count(), 5); // header + 4 Steiner nodes
}

#[test]
fn block_tap_rejects_non_tree_base() {
    let file = serde_json::json!({
        "format_version": 1,
        "kind": "block-tap",
        "nodes": (0..3).map(|id| serde_json::json!({
            "id": id, "label": format!("n{id}"), "role": "plain"
        })).collect::<Vec<_>>(),
        "edges": [[0,1],[1,2],[2,0]],
        "links": [[0,2]],
        "terminals": [],
        "metadata": {}
    });
    let dir = std::env::temp_dir().join("augur-cli-test-nontree");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tri.json");
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let out = augur()
        .args(["solve", "--input", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_root_flag_reaches_the_relaxation() {
    let dir = std::env::temp_dir().join("augur-cli-test-root");
    std::fs::create_dir_all(&dir).unwrap();
    let inst = dir.join("p2.json");
    let dump = dir.join("lp.json");
    let text = run_ok(&["generate", "--kind", "path-family", "--t", "2"]);
    std::fs::write(&inst, text).unwrap();
    // Terminals of the t=2 path family are ids 2..=5; pick a non-default root.
    run_ok(&[
        "solve",
        "--input",
        inst.to_str().unwrap(),
        "--root",
        "4",
        "--dump-lp",
        dump.to_str().unwrap(),
    ]);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(v["root"], 4);
}

#[test]
fn loader_rejects_malformed_documents() {
    let dir = std::env::temp_dir().join("augur-cli-test-malformed");
    std::fs::create_dir_all(&dir).unwrap();
    let cases = [
        ("not json at all", "garbage"),
        ("wrong version", r#"{"format_version":9,"kind":"ca","nodes":[],"edges":[]}"#),
        ("unknown kind", r#"{"format_version":1,"kind":"mystery","nodes":[],"edges":[]}"#),
        (
            "edge out of range",
            r#"{"format_version":1,"kind":"ca","nodes":[{"id":0,"label":"a","role":"steiner"}],"edges":[[0,5]]}"#,
        ),
        (
            "self loop",
            r#"{"format_version":1,"kind":"ca","nodes":[{"id":0,"label":"a","role":"steiner"}],"edges":[[0,0]]}"#,
        ),
    ];
    for (name, body) in cases {
        let path = dir.join("bad.json");
        std::fs::write(&path, body).unwrap();
        let out = augur()
            .args(["solve", "--input", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(1), "case '{name}' should exit 1");
        assert!(!out.stderr.is_empty(), "case '{name}' should explain itself");
    }
}
