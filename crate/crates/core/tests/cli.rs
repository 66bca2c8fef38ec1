use std::process::{Command, Output};

use serde_json::Value;

fn gvml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gvml")).args(args).env_remove("GVML_SEED").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn unknown_names_exit_with_usage_code() {
    assert_eq!(gvml(&["gallery", "nope"]).status.code(), Some(2));
    let out = gvml(&["suite", "bogus_suite"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("transfer_pcau"));
}

#[test]
fn bad_flags_exit_with_usage_code() {
    assert_eq!(gvml(&["suite"]).status.code(), Some(2));
    assert_eq!(
        gvml(&[
            "classify",
            "--space",
            "reals_md",
            "--sequence",
            "harmonic",
            "--epsilon",
            "2",
            "--t",
            "1",
            "--horizon",
            "10"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(gvml(&["--help"]).status.code(), Some(0));
}

#[test]
fn gallery_entry_reports_its_facts() {
    let out = gvml(&["gallery", "pseudo_pairs"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["name"], "pseudo_pairs");
    assert!(report["facts"].as_array().unwrap().iter().all(|f| f["holds"] == true));
}

#[test]
fn suite_reports_are_deterministic_and_honour_the_seed_variable() {
    let a = gvml(&["suite", "transfer_g", "--seed", "3", "--cases", "20"]);
    let b = gvml(&["suite", "transfer_g", "--seed", "3", "--cases", "20"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_gvml"))
        .args(["suite", "transfer_g", "--cases", "20"])
        .env("GVML_SEED", "3")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
    assert_eq!(json(&gvml(&["suite", "tnorm_axioms"]))["seed"], 7);
}

#[test]
fn check_axioms_expands_ranges_over_the_two_families() {
    let out = gvml(&["check-axioms", "--space", "note_space", "--points", "x3..x12", "y3..y12", "--tgrid", "1/2,1"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["points"], 20);
    assert_eq!(report["verdict"]["status"], "SATISFIED_AT_SCALE");
}

#[test]
fn check_axioms_refutes_a_bad_table() {
    let space = r#"{"kind":"table","tnorm":"prod","points":["a","b","c"],"M":[["1","9/10","1/10"],["9/10","1","9/10"],["1/10","9/10","1"]]}"#;
    let out = gvml(&["check-axioms", "--space", space, "--points", "a,b,c", "--tgrid", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"]["status"], "REFUTED_AT_SCALE");
}

#[test]
fn classify_reads_json_files() {
    let dir = std::env::temp_dir().join(format!("gvml-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let space = dir.join("space.json");
    let seq = dir.join("seq.json");
    std::fs::write(&space, r#"{"kind":"standard_from_metric","metric":"euclid1d","domain":"integers"}"#).unwrap();
    std::fs::write(&seq, r#"{"kind":"explicit","values":[0,1,0,2,0,3,0,4,0,5,0,6]}"#).unwrap();
    let out = gvml(&[
        "classify",
        "--space",
        space.to_str().unwrap(),
        "--sequence",
        seq.to_str().unwrap(),
        "--epsilon",
        "1/10",
        "--t",
        "1",
        "--horizon",
        "12",
        "--m",
        "3",
        "--kmax",
        "2",
    ]);
    std::fs::remove_dir_all(&dir).unwrap();
    let report = json(&out);
    assert_eq!(report["cofinally_cauchy"]["status"], "SATISFIED_AT_SCALE");
    assert_eq!(report["g_cauchy"]["status"], "REFUTED_AT_SCALE");
    assert_eq!(out.status.code(), Some(1));
}
