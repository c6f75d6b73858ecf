use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn diagscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diagscope"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn synth(dir: &Path, n: usize) -> PathBuf {
    let corpus = dir.join("corpus");
    let n = n.to_string();
    let out = diagscope(&["-q", "synth", "--seed", "3", "--n", &n, "--out", corpus.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    corpus
}

#[test]
fn pipeline_writes_every_table_and_leaves_input_alone() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(tmp.path(), 12);
    let before = snapshot(&corpus);
    let out_dir = tmp.path().join("run");
    let out = diagscope(&["-q", "pipeline", "--in", corpus.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(snapshot(&corpus), before);

    for name in [
        "run.meta.json",
        "centroids.csv",
        "features.csv",
        "embedding.csv",
        "embedding.meta.json",
        "components.csv",
        "relations.csv",
        "crosstab.csv",
        "scatter_labels.svg",
        "scatter_labels.png",
        "scatter_thumbnails.svg",
    ] {
        assert!(out_dir.join(name).is_file(), "missing {name}");
    }
    let features = fs::read_to_string(out_dir.join("features.csv")).unwrap();
    let header: Vec<&str> = features.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 2 + 90);

    let meta: Value = serde_json::from_slice(&fs::read(out_dir.join("run.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "pipeline");
    assert_eq!(meta["inputs"].as_object().unwrap().len(), before.len());
    assert_eq!(meta["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn validate_reports_grouping_cycle_with_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(tmp.path(), 3);
    let path = corpus.join("annotations/synth-0000.json");
    let mut doc: Value = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    let edges = doc["grouping"]["edges"].as_array_mut().unwrap();
    let (parent, child) = {
        let e = edges.iter().find(|e| e["child"].as_str().unwrap().starts_with('G')).unwrap();
        (e["parent"].clone(), e["child"].clone())
    };
    edges.push(serde_json::json!({"parent": child, "child": parent}));
    fs::write(&path, serde_json::to_vec_pretty(&doc).unwrap()).unwrap();

    let report = tmp.path().join("report");
    let out = diagscope(&["validate", "--in", corpus.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    let csv = fs::read_to_string(report.join("violations.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("synth-0000,error,grouping_not")), "{csv}");

    let clean = tmp.path().join("clean");
    synth(&clean, 3);
    let out = diagscope(&["-q", "validate", "--in", clean.join("corpus").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn config_file_supplies_options_and_flags_override() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("synth.json");
    fs::write(&config, r#"{"seed": 9, "n": 5, "mix": "cycle=1"}"#).unwrap();
    let out_dir = tmp.path().join("c");
    let out = diagscope(&[
        "-q",
        "--config",
        config.to_str().unwrap(),
        "synth",
        "--n",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(fs::read_dir(out_dir.join("annotations")).unwrap().count(), 2);
    let meta: Value = serde_json::from_slice(&fs::read(out_dir.join("run.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["seed"], 9);
    assert_eq!(meta["config"]["n"], 2);
    assert_eq!(meta["seed"], 9);

    fs::write(&config, r#"{"sead": 9}"#).unwrap();
    let out = diagscope(&["--config", config.to_str().unwrap(), "synth", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("sead"));
}

#[test]
fn exit_codes_follow_error_kind() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&diagscope(&["stats", "--bogus"])), 1);
    assert_eq!(code(&diagscope(&["--help"])), 0);

    let missing = tmp.path().join("nope");
    let out = diagscope(&["stats", "--in", missing.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));

    let corpus = synth(tmp.path(), 3);
    let inside = corpus.join("out");
    let out = diagscope(&["stats", "--in", corpus.to_str().unwrap(), "--out", inside.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert!(!inside.exists());
}

#[test]
fn skipped_diagrams_give_exit_2_and_a_list() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(tmp.path(), 4);
    fs::write(corpus.join("annotations/synth-0001.json"), "{ not json").unwrap();
    let out_dir = tmp.path().join("s");
    let out = diagscope(&["-q", "stats", "--in", corpus.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    let skipped = fs::read_to_string(out_dir.join("skipped.csv")).unwrap();
    assert!(skipped.contains("synth-0001"), "{skipped}");
    assert!(out_dir.join("components.csv").is_file());
}

#[test]
fn no_color_env_strips_escape_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_diagscope"))
        .args(["-vv", "synth", "--n", "2", "--out", tmp.path().join("c").to_str().unwrap()])
        .env("DIAGSCOPE_NO_COLOR", "1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let err = stderr(&out);
    assert!(!err.is_empty());
    assert!(!err.contains('\u{1b}'), "{err:?}");
}

#[test]
fn embed_and_render_read_previous_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(tmp.path(), 8);
    let c = corpus.to_str().unwrap();
    let f = tmp.path().join("f");
    let e = tmp.path().join("e");
    let r = tmp.path().join("r");
    assert_eq!(code(&diagscope(&["-q", "features", "--in", c, "--out", f.to_str().unwrap()])), 0);
    let features = f.join("features.csv");
    let out = diagscope(&[
        "-q",
        "embed",
        "--in",
        c,
        "--features",
        features.to_str().unwrap(),
        "--method",
        "pca",
        "--out",
        e.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let embedding = e.join("embedding.csv");
    let rows = fs::read_to_string(&embedding).unwrap().lines().count();
    assert_eq!(rows, fs::read_to_string(&features).unwrap().lines().count());
    let out = diagscope(&[
        "-q",
        "render",
        "--in",
        c,
        "--embedding",
        embedding.to_str().unwrap(),
        "--out",
        r.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(r.join("scatter_labels.svg").is_file());
}
