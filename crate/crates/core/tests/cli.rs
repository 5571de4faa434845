use std::path::Path;
use std::process::{Command, Output};

const SINGLE: &str = "effect,se,label\n0.9,0.3,A\n1.4,0.25,B\n0.2,0.4,C\n1.1,0.2,D\n0.6,0.35,E\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bma-meta")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn analyze_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "single.csv", SINGLE);
    let svg = dir.path().join("forest.svg");
    let out = run(&[
        "analyze",
        &input,
        "--delta-prior",
        "t(0.0,0.51,5.0)",
        "--tau-prior",
        "invgamma(1.79,0.28)",
        "--sequential",
        "--forest",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["studies"], 5);
    assert_eq!(report["models"].as_array().unwrap().len(), 4);
    assert_eq!(report["sequential"].as_array().unwrap().len(), 5);
    let total: f64 = report["model_type_posteriors"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let plot = std::fs::read_to_string(svg).unwrap();
    assert!(plot.starts_with("<svg") && plot.trim_end().ends_with("</svg>"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "single.csv", SINGLE);
    let empty = write(dir.path(), "empty.csv", "");
    let no_id = write(dir.path(), "corpus.csv", SINGLE);
    let missing = dir.path().join("missing.csv");

    let cases: Vec<Vec<&str>> = vec![
        vec!["analyze", missing.to_str().unwrap()],
        vec!["analyze", &empty],
        vec!["analyze", &input, "--delta-prior", "lognormal(0,1)"],
        vec!["analyze", &input, "--model-priors", "0.5,0.5,0.5"],
        vec!["rank", &no_id, "--mode", "configs"],
        vec!["analyze"],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn catalog_commands() {
    let out = run(&["catalog", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let list: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(list["topics"].as_array().unwrap().len(), 46);

    let out = run(&["catalog", "show", "oral health"]);
    assert_eq!(out.status.code(), Some(0));
    let found: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(found["unmatched"], false);
}

#[test]
fn output_file_replaces_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "single.csv", SINGLE);
    let target = dir.path().join("report.json");
    let out = run(&["analyze", &input, "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(report["priors"]["delta"].as_array().unwrap().len(), 1);
}
