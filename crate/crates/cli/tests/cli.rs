use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nestbench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nestbench"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .env_remove("OPENAI_API_KEY")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = nestbench(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = nestbench(dir, args);
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

const GEN: [&str; 11] = ["gen", "--task", "arithmetic", "--nesting", "2", "--operands", "2", "--count", "100", "--seed", "7"];

#[test]
fn gen_is_deterministic_and_validated() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &[&GEN[..], &["--out", "a.jsonl"]].concat());
    ok(d, &[&GEN[..], &["--out", "b.jsonl"]].concat());
    let a = fs::read(d.join("a.jsonl")).unwrap();
    assert_eq!(a, fs::read(d.join("b.jsonl")).unwrap());
    assert_eq!(a.iter().filter(|&&b| b == b'\n').count(), 100);

    let (c, err) = code(d, &["gen", "--task", "arithmetic", "--nesting", "0", "--operands", "2", "--out", "x.jsonl"]);
    assert_eq!(c, 2);
    assert!(err.contains("--nesting"));
    assert_eq!(code(d, &["gen", "--task", "geometry", "--all-splits", "--out", "x.jsonl"]).0, 2);
    assert_eq!(code(d, &["gen", "--task", "listops", "--out", "x.jsonl"]).0, 2);
    assert!(!d.join("x.jsonl").exists());

    ok(d, &["gen", "--task", "listops", "--all-splits", "--count", "3", "--out", "all.jsonl"]);
    assert_eq!(fs::read_to_string(d.join("all.jsonl")).unwrap().lines().count(), 27);
}

#[test]
fn oracle_run_scores_perfectly_and_reruns_are_no_ops() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &[&GEN[..], &["--out", "data.jsonl"]].concat());
    let run = ["run", "--dataset", "data.jsonl", "--method", "zero_shot", "--model", "m", "--provider", "mock:oracle", "--out", "r"];
    ok(d, &run);
    let preds = fs::read(d.join("r/predictions.jsonl")).unwrap();
    let manifest = fs::read(d.join("r/manifest.json")).unwrap();
    assert!(String::from_utf8_lossy(&preds).starts_with("{\"id\":\"arithmetic-2-2-0\",\"output\":"));
    let again = ok(d, &run);
    assert!(again.contains("answered 0 records (100 reused)"));
    assert_eq!(fs::read(d.join("r/predictions.jsonl")).unwrap(), preds);
    assert_eq!(fs::read(d.join("r/manifest.json")).unwrap(), manifest);

    let stdout = ok(d, &["score", "--pred", "r/predictions.jsonl", "--gold", "data.jsonl", "--out", "r"]);
    assert!(stdout.contains("100/100 correct, accuracy 1.00"), "{stdout}");
    assert_eq!(
        fs::read_to_string(d.join("r/summary.csv")).unwrap(),
        "task,method,model,correct,total,accuracy\narithmetic,zero_shot,m,100,100,1.00\n"
    );
    assert_eq!(fs::read_to_string(d.join("r/grid.csv")).unwrap(), "N\\O,O=2\nN=2,1.0000\n");

    // same directory, different run
    let (c, err) = code(d, &["run", "--dataset", "data.jsonl", "--method", "few_shot", "--model", "m", "--provider", "mock:oracle", "--out", "r"]);
    assert_eq!(c, 2, "{err}");
}

#[test]
fn interrupted_runs_resume() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &[&GEN[..], &["--out", "data.jsonl"]].concat());
    let run = |out: &'static str| {
        ["run", "--dataset", "data.jsonl", "--method", "self_consistency", "--model", "m", "--provider", "mock:noisy:0.4:13", "--out", out]
    };
    ok(d, &run("full"));
    let full = fs::read_to_string(d.join("full/predictions.jsonl")).unwrap();
    for line in full.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["samples"].as_array().unwrap().len(), 5);
    }

    // simulate an interruption: 40 complete lines and a torn one
    fs::create_dir_all(d.join("part")).unwrap();
    ok(d, &run("part"));
    let mut partial: String = full.lines().take(40).map(|l| format!("{l}\n")).collect();
    partial.push_str(&full.lines().nth(40).unwrap()[..25]);
    fs::write(d.join("part/predictions.jsonl"), partial).unwrap();
    let stdout = ok(d, &run("part"));
    assert!(stdout.contains("answered 60 records (40 reused)"), "{stdout}");
    assert_eq!(fs::read_to_string(d.join("part/predictions.jsonl")).unwrap(), full);
}

#[test]
fn score_rejects_mismatched_ids() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["gen", "--task", "listops", "--all-splits", "--count", "4", "--seed", "1", "--out", "gold.jsonl"]);
    ok(d, &["run", "--dataset", "gold.jsonl", "--method", "few_shot", "--model", "m", "--provider", "mock:oracle", "--out", "r"]);
    let preds = fs::read_to_string(d.join("r/predictions.jsonl")).unwrap();
    let without_split: String = preds.lines().filter(|l| !l.contains("listops-4-4-")).map(|l| format!("{l}\n")).collect();
    fs::write(d.join("missing.jsonl"), without_split).unwrap();
    let (c, err) = code(d, &["score", "--pred", "missing.jsonl", "--gold", "gold.jsonl", "--out", "s"]);
    assert_eq!(c, 2);
    assert!(err.contains("gold ids without predictions: listops-4-4-0"), "{err}");

    fs::write(d.join("extra.jsonl"), format!("{preds}{{\"id\":\"nope\",\"output\":\"1\"}}\n")).unwrap();
    let (c, err) = code(d, &["score", "--pred", "extra.jsonl", "--gold", "gold.jsonl", "--out", "s"]);
    assert_eq!(c, 2);
    assert!(err.contains("nope"));
}

#[test]
fn report_against_itself_has_zero_gain() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["gen", "--task", "algebra", "--all-splits", "--count", "2", "--out", "g.jsonl"]);
    ok(d, &["run", "--dataset", "g.jsonl", "--method", "verbal_cot", "--model", "m", "--provider", "mock:oracle", "--out", "v"]);
    ok(d, &["score", "--pred", "v/predictions.jsonl", "--gold", "g.jsonl", "--out", "v"]);
    ok(d, &["report", "--runs", "v", "--baseline", "verbal_cot", "--out", "rep"]);
    let gain = fs::read_to_string(d.join("rep/gains/m__algebra__verbal_cot.csv")).unwrap();
    assert_eq!(gain, "N\\O,O=2,O=3,O=4\nN=2,+0.0000,+0.0000,+0.0000\nN=3,+0.0000,+0.0000,+0.0000\nN=4,+0.0000,+0.0000,+0.0000\n");
    assert_eq!(fs::read_to_string(d.join("rep/summary.csv")).unwrap(), "model,method,ListOps,Arithmetic,Algebra\nm,verbal_cot,,,1.00\n");
    assert_eq!(code(d, &["report", "--runs", "nowhere", "--out", "rep2"]).0, 2);
}

#[test]
fn missing_credentials_are_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["gen", "--task", "listops", "--nesting", "2", "--operands", "2", "--count", "1", "--out", "g.jsonl"]);
    let (c, err) = code(d, &["run", "--dataset", "g.jsonl", "--method", "zero_shot", "--model", "gpt-4", "--out", "r"]);
    assert_eq!(c, 2);
    assert!(err.contains("OPENAI_API_KEY"), "{err}");
    assert_eq!(code(d, &["run", "--dataset", "absent.jsonl", "--method", "zero_shot", "--model", "m", "--provider", "mock:oracle", "--out", "r"]).0, 1);
}
