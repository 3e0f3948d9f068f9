use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_typediv"));
    cmd.env_remove("OPENAI_API_KEY").env("RUST_LOG", "off");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1, "expected one stderr line, got {text:?}");
    serde_json::from_str(lines[0]).unwrap()
}

fn item(id: &str, tokens: u32, constructions: &[&str], lextypes: &[&str], cpu: Option<f64>) -> Value {
    let mut v = json!({
        "id": id,
        "sentence": vec!["w"; tokens as usize].join(" "),
        "token_count": tokens,
        "parsed": true,
        "construction_labels": constructions,
        "lextype_labels": lextypes,
    });
    if let Some(cpu) = cpu {
        v["cpu_seconds"] = json!(cpu);
        v["memory_gb"] = json!(1.0);
    }
    v
}

fn write_corpus(dir: &Path, name: &str, items: &[Value]) -> PathBuf {
    let path = dir.join(format!("{name}.jsonl"));
    let text: String = items.iter().map(|v| format!("{v}\n")).collect();
    fs::write(&path, text).unwrap();
    path
}

/// Three small corpora with clearly ordered construction diversity.
fn three_corpora(dir: &Path, extra: Value) -> PathBuf {
    write_corpus(dir, "flat", &[
        item("a", 5, &["x1", "x2", "x3", "x4"], &["n_le", "v_le"], Some(1.0)),
        item("b", 40, &["x5", "x6", "x7", "x8"], &["n_le", "pt_-_comma_le"], Some(3.0)),
    ]);
    write_corpus(dir, "mid", &[
        item("a", 12, &["x1", "x1", "x2", "x3"], &["n_le", "v_le"], None),
        item("b", 33, &["x1", "x2", "x2", "x3"], &["n_le", "v_le"], None),
    ]);
    write_corpus(dir, "skewed", &[
        item("a", 20, &["x1", "x1", "x1", "x1"], &["n_le", "n_le"], Some(2.0)),
        item("b", 31, &["x1", "x1", "x1", "x2"], &["v_le", "n_le"], Some(4.0)),
    ]);
    let mut config = json!({
        "corpora": [
            {"name": "skewed", "path": "skewed.jsonl", "format": "jsonl", "kind": "llm", "year": "2023"},
            {"name": "flat", "path": "flat.jsonl", "format": "jsonl", "kind": "human", "year": "2023"},
            {"name": "mid", "path": "mid.jsonl", "format": "jsonl", "kind": "llm", "year": "2025"}
        ],
        "analyses": [{"category": "construction"}],
        "metrics": ["shannon"],
        "bootstrap": {"iterations": 50, "seed": 3}
    });
    for (k, v) in extra.as_object().unwrap() {
        config[k] = v.clone();
    }
    let path = dir.join("run.json");
    fs::write(&path, config.to_string()).unwrap();
    path
}

#[test]
fn diversity_rows_sorted_by_point() {
    let dir = tempfile::tempdir().unwrap();
    let config = three_corpora(dir.path(), json!({}));
    let out = run(&["--config", config.to_str().unwrap(), "diversity"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/diversity_construction_all_shannon.csv")).unwrap();
    let corpora: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(corpora, ["flat", "mid", "skewed"]);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",8,50,3")));
    let resolved: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/resolved_config.json")).unwrap()).unwrap();
    assert_eq!(resolved["comparisons"]["top_k"], 10);
    assert_eq!(resolved["bootstrap"]["target_n"], "min_n");
}

#[test]
fn reruns_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let config = three_corpora(dir.path(), json!({}));
    let csv = dir.path().join("out/diversity_construction_all_shannon.csv");
    assert!(run(&["--config", config.to_str().unwrap(), "diversity"]).status.success());
    let first = fs::read(&csv).unwrap();
    assert!(run(&["--config", config.to_str().unwrap(), "--threads", "1", "diversity"]).status.success());
    assert_eq!(fs::read(&csv).unwrap(), first);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = three_corpora(dir.path(), json!({}));
    assert!(run(&["--config", config.to_str().unwrap(), "--seed", "99", "diversity"]).status.success());
    let csv = fs::read_to_string(dir.path().join("out/diversity_construction_all_shannon.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",99")));
}

#[test]
fn punct_filter_on_constructions_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = three_corpora(
        dir.path(),
        json!({"analyses": [{"category": "construction", "filter": "punct_only"}]}),
    );
    let out = run(&["--config", config.to_str().unwrap(), "diversity"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "filter_on_constructions");
    assert!(err["corpus"].is_string());
}

#[test]
fn unwritable_output_is_io() {
    let dir = tempfile::tempdir().unwrap();
    let config = three_corpora(dir.path(), json!({}));
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let out = run(&[
        "--config", config.to_str().unwrap(),
        "--out", blocker.join("sub").to_str().unwrap(),
        "diversity",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "io");
}

#[test]
fn compare_needs_two_corpora() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), "only", &[item("a", 5, &["x"], &["n_le"], None)]);
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        json!({"corpora": [{"name": "only", "path": "only.jsonl", "format": "jsonl", "kind": "human", "year": "2023"}]})
            .to_string(),
    )
    .unwrap();
    let out = run(&["--config", config.to_str().unwrap(), "compare"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "usage");
}

#[test]
fn group_comparison_pools_members() {
    let dir = tempfile::tempdir().unwrap();
    let config = three_corpora(
        dir.path(),
        json!({"comparisons": {
            "groups": [{"first": {"name": "2023 models", "members": ["skewed", "flat"]},
                        "second": {"name": "2025 models", "members": ["mid"]}}],
            "top_k": 3, "examples_per_type": 2
        }}),
    );
    let out = run(&["--config", config.to_str().unwrap(), "compare", "--stat", "freq-delta"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let written: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(written.len(), 2);
    let csv = fs::read_to_string(dir.path().join("out/compare_2023_models_vs_2025_models_construction_all.csv")).unwrap();
    // pooled 2023: x1 is 8 of 16 tokens, 2025: 3 of 8; 0.5 |1/2 - 3/8| = 0.0625
    assert!(csv.contains("3,x1,0.062500,first,0.500000,0.375000\n"), "{csv}");
    assert!(csv.contains("1,x2,0.125000,second,0.125000,0.375000\n"), "{csv}");
    assert_eq!(csv.lines().count(), 4);
    let txt = fs::read_to_string(dir.path().join("out/compare_2023_models_vs_2025_models_construction_all.txt")).unwrap();
    assert!(txt.starts_with("2023 models vs 2025 models (construction, all): freq-delta total "));
    assert!(txt.contains("Preferred by"));
}

#[test]
fn parsability_rows_in_input_order_with_missing_costs() {
    let dir = tempfile::tempdir().unwrap();
    let config = three_corpora(dir.path(), json!({}));
    let out = run(&["--config", config.to_str().unwrap(), "parsability"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let txt = fs::read_to_string(dir.path().join("out/parsability_stats.txt")).unwrap();
    let names: Vec<&str> = txt.lines().skip(2).map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names, ["skewed", "flat", "mid"]);
    let mid = txt.lines().nth(4).unwrap();
    assert_eq!(mid.matches('—').count(), 2, "{mid}");
    let csv = fs::read_to_string(dir.path().join("out/parsability_stats.csv")).unwrap();
    assert!(csv.lines().nth(3).unwrap().contains(",,,"));
    let bins = fs::read_to_string(dir.path().join("out/parsability_bins.csv")).unwrap();
    // flat has one 40-token item at 3.0 s; skewed one 31-token item at 4.0 s
    assert_eq!(bins.lines().nth(1).unwrap(), "skewed,4.000000,,,,1.000000,,,,1,0,0,0");
    assert_eq!(bins.lines().nth(2).unwrap(), "flat,,3.000000,,,,1.000000,,,0,1,0,0");
}

#[test]
fn missing_config_is_usage() {
    let out = run(&["diversity"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "usage");
    let out = run(&["bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "usage");
}

fn harness_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../harness/tests/fixtures").join(name)
}

#[test]
fn generate_from_replay() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec![
            "--out".to_string(), out.display().to_string(),
            "generate".into(),
            "--tasks".into(), harness_fixture("tasks.jsonl").display().to_string(),
            "--model".into(), "fixture-model".into(),
            "--endpoint".into(), "http://127.0.0.1:9/v1/chat/completions".into(),
            "--replay".into(), harness_fixture("replay_generate.jsonl").display().to_string(),
            "--concurrency".into(), "3".into(),
        ]
    };
    let out = bin().args(args(dir.path())).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let got = fs::read(dir.path().join("generations/fixture-model.jsonl")).unwrap();
    assert_eq!(got, fs::read(harness_fixture("results_expected.jsonl")).unwrap());
}

#[test]
fn live_generation_without_credential_fails_fast() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--out", dir.path().to_str().unwrap(),
        "generate",
        "--tasks", harness_fixture("tasks.jsonl").to_str().unwrap(),
        "--model", "m",
        "--endpoint", "http://127.0.0.1:9/v1/chat/completions",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "missing_credential");
}

#[test]
fn fetch_headlines_from_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--out", dir.path().to_str().unwrap(),
        "fetch-headlines",
        "--months", "2023-01",
        "--endpoint", "http://127.0.0.1:9/svc/archive/v1",
        "--replay", harness_fixture("replay_archive.jsonl").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let tasks = fs::read_to_string(dir.path().join("tasks.jsonl")).unwrap();
    assert_eq!(tasks.lines().count(), 2);
    assert!(tasks.contains(r#""lead_three_words":"Markets fell sharply""#));
}
