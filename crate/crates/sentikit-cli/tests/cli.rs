//! Black-box tests of the `sentikit` binary: flag surface, exit codes,
//! artifact layout, and output schemas, all on a small generated corpus.

use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use sentikit::model_file::ModelFile;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sentikit"))
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = bin();
    cmd.args(args).env_remove("SENTIKIT_DATA");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn sentikit")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn assert_ok(out: &Output, what: &str) {
    assert!(out.status.success(), "{what} failed: {}", stderr_of(out));
}

/// Generates a small three-class corpus under `dir` and returns its path.
fn tiny_corpus(dir: &Path) -> PathBuf {
    let path = dir.join("tiny.csv");
    let out = run(
        &[
            "synth",
            "--counts",
            "30,20,10",
            "--out",
            path.to_str().unwrap(),
        ],
        &[],
    );
    assert_ok(&out, "synth");
    path
}

fn write_config(dir: &Path, data: &Path, extra: &str) -> PathBuf {
    let path = dir.join("run.toml");
    let text = format!(
        "[data]\npath = {:?}\n\n[lr]\nepochs = 10\n\n[rf]\nn_trees = 5\n\n[lstm]\nepochs = 2\n{extra}",
        data.to_str().unwrap()
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn help_lists_every_subcommand_and_global_flag() {
    let out = run(&["--help"], &[]);
    assert_ok(&out, "--help");
    let text = stdout_of(&out);
    for needle in [
        "stats",
        "preprocess",
        "train",
        "compare",
        "predict",
        "stem",
        "synth",
        "--config",
        "--seed",
        "--out",
        "--json",
    ] {
        assert!(text.contains(needle), "--help missing {needle}");
    }
    for sub in [
        "stats",
        "preprocess",
        "train",
        "compare",
        "predict",
        "stem",
        "synth",
    ] {
        let out = run(&[sub, "--help"], &[]);
        assert_ok(&out, "subcommand --help");
    }
}

#[test]
fn unknown_flags_are_rejected_not_ignored() {
    let out = run(&["stats", "--definitely-not-a-flag"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_dataset_exits_2_with_guidance() {
    let out = run(&["stats"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("SENTIKIT_DATA"));
}

#[test]
fn stats_reads_the_env_fallback() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tiny_corpus(tmp.path());
    let out = run(
        &["stats", "--json"],
        &[("SENTIKIT_DATA", data.to_str().unwrap())],
    );
    assert_ok(&out, "stats");
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["total"], 60);
    assert_eq!(v["classes"]["negative"]["count"], 30);
    assert_eq!(v["classes"]["positive"]["count"], 20);
    assert_eq!(v["classes"]["neutral"]["count"], 10);
}

#[test]
fn preprocess_text_prints_tokens() {
    let out = run(
        &[
            "preprocess",
            "--text",
            "Gamenya bagus bangetttt!!!",
            "--json",
        ],
        &[],
    );
    assert_ok(&out, "preprocess --text");
    let tokens: Vec<String> = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(tokens, ["gamenya", "bagus", "banget"]);
}

#[test]
fn preprocess_csv_writes_one_json_array_per_row() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tiny_corpus(tmp.path());
    let jsonl = tmp.path().join("tokens.jsonl");
    let out = run(
        &[
            "preprocess",
            "--in",
            data.to_str().unwrap(),
            "--out",
            jsonl.to_str().unwrap(),
        ],
        &[],
    );
    assert_ok(&out, "preprocess --in");
    let text = std::fs::read_to_string(&jsonl).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 60);
    for line in lines {
        let tokens: Vec<String> = serde_json::from_str(line).expect("token array");
        assert!(!tokens.is_empty());
    }
}

#[test]
fn preprocess_requires_exactly_one_input_mode() {
    let out = run(&["preprocess"], &[]);
    assert_eq!(out.status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let data = tiny_corpus(tmp.path());
    let out = run(
        &["preprocess", "--in", data.to_str().unwrap(), "--text", "x"],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn train_writes_artifacts_and_predictions_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tiny_corpus(tmp.path());
    let config = write_config(tmp.path(), &data, "");
    let out_dir = tmp.path().join("out");
    let out = run(
        &[
            "train",
            "--model",
            "nb",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    );
    assert_ok(&out, "train nb");
    for artifact in ["model_nb.skm", "eval_nb.json", "confusion_nb.csv"] {
        assert!(out_dir.join(artifact).exists(), "{artifact} missing");
    }

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("eval_nb.json")).unwrap())
            .unwrap();
    assert_eq!(report["model"], "nb");
    assert_eq!(
        report["class_names"],
        serde_json::json!(["negative", "positive", "neutral"])
    );
    assert!(report["metrics"]["accuracy"].as_f64().unwrap() >= 0.0);

    let model = out_dir.join("model_nb.skm");
    let out = run(
        &[
            "predict",
            "--model",
            model.to_str().unwrap(),
            "--text",
            "grafik bagus banget mantap",
            "--json",
        ],
        &[],
    );
    assert_ok(&out, "predict");
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let label = v["label"].as_str().unwrap();
    assert!(["negative", "positive", "neutral"].contains(&label));
    let sum: f64 = ["negative", "positive", "neutral"]
        .iter()
        .map(|c| v["probs"][c].as_f64().unwrap())
        .sum();
    assert!((sum - 1.0).abs() < 1e-9, "probabilities sum to {sum}");
}

#[test]
fn predict_batch_preserves_count_and_order() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tiny_corpus(tmp.path());
    let config = write_config(tmp.path(), &data, "");
    let out_dir = tmp.path().join("out");
    let out = run(
        &[
            "train",
            "--model",
            "lr",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    );
    assert_ok(&out, "train lr");

    let mut child = bin()
        .args([
            "predict",
            "--model",
            out_dir.join("model_lr.skm").to_str().unwrap(),
            "--stdin",
            "--json",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"bagus banget mantap\n\njelek lemot kecewa\nseru puas\nrusak error\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_ok(&out, "predict --stdin");
    let stdout = stdout_of(&out);
    let lines: Vec<&str> = stdout.lines().map(str::trim).collect();
    assert_eq!(lines.len(), 5, "five inputs, five records");
    let records: Vec<serde_json::Value> = lines
        .iter()
        .map(|l| serde_json::from_str(l).expect("json record"))
        .collect();
    assert_eq!(records[1]["degenerate"], true, "empty line flagged");
    assert!(stderr_of(&out).contains("no tokens"));
    for rec in &records {
        let sum: f64 = ["negative", "positive", "neutral"]
            .iter()
            .map(|c| rec["probs"][c].as_f64().unwrap())
            .sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }
}

#[test]
fn compare_subset_emits_matching_leaderboard_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tiny_corpus(tmp.path());
    let config = write_config(tmp.path(), &data, "");
    let out_dir = tmp.path().join("out");
    let out = run(
        &[
            "compare",
            "--models",
            "nb,lr",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    );
    assert_ok(&out, "compare nb,lr");
    let csv = std::fs::read_to_string(out_dir.join("leaderboard.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "model,accuracy,precision,recall,f1");
    assert_eq!(lines.len(), 3, "header plus two rows");
    let mut names: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    names.sort_unstable();
    assert_eq!(names, ["lr", "nb"]);
    assert!(out_dir.join("vocab.tsv").exists());
    assert!(!out_dir.join("model_rf.skm").exists());
}

#[test]
fn compare_cv_writes_summary_table() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tiny_corpus(tmp.path());
    let config = write_config(tmp.path(), &data, "");
    let out_dir = tmp.path().join("out");
    let out = run(
        &[
            "compare",
            "--models",
            "nb",
            "--cv",
            "3",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    );
    assert_ok(&out, "compare --cv");
    let csv = std::fs::read_to_string(out_dir.join("cv_summary.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("model,accuracy_mean,accuracy_std"));
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("nb,"));
}

#[test]
fn oversized_fold_count_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tiny_corpus(tmp.path());
    let config = write_config(tmp.path(), &data, "");
    let out = run(
        &[
            "compare",
            "--models",
            "nb",
            "--cv",
            "11",
            "--config",
            config.to_str().unwrap(),
            "--out",
            tmp.path().join("out").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
}

#[test]
fn unknown_model_name_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tiny_corpus(tmp.path());
    let config = write_config(tmp.path(), &data, "");
    let out = run(
        &[
            "train",
            "--model",
            "svm",
            "--config",
            config.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupted_fingerprint_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tiny_corpus(tmp.path());
    let config = write_config(tmp.path(), &data, "");
    let out_dir = tmp.path().join("out");
    let out = run(
        &[
            "train",
            "--model",
            "nb",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    );
    assert_ok(&out, "train nb");

    let path = out_dir.join("model_nb.skm");
    let mut file = ModelFile::load(&path).unwrap();
    file.fingerprint.dictionary = "0".repeat(64);
    let tampered = out_dir.join("tampered.skm");
    file.save(&tampered).unwrap();

    let out = run(
        &[
            "predict",
            "--model",
            tampered.to_str().unwrap(),
            "--text",
            "bagus",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(4), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("fingerprint"));
}

#[test]
fn seed_flag_overrides_config_and_lands_in_meta() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tiny_corpus(tmp.path());
    let config = write_config(tmp.path(), &data, "");
    let out_dir = tmp.path().join("out");
    let out = run(
        &[
            "train",
            "--model",
            "nb",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--seed",
            "7",
        ],
        &[],
    );
    assert_ok(&out, "train nb --seed 7");
    let file = ModelFile::load(&out_dir.join("model_nb.skm")).unwrap();
    assert_eq!(file.meta["seed"], "7");
    assert_eq!(file.meta["model"], "nb");
}

#[test]
fn train_is_deterministic_for_a_single_model() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tiny_corpus(tmp.path());
    let config = write_config(tmp.path(), &data, "");
    let dirs = [tmp.path().join("a"), tmp.path().join("b")];
    for dir in &dirs {
        let out = run(
            &[
                "train",
                "--model",
                "lstm",
                "--config",
                config.to_str().unwrap(),
                "--out",
                dir.to_str().unwrap(),
            ],
            &[],
        );
        assert_ok(&out, "train lstm");
    }
    for name in ["model_lstm.skm", "eval_lstm.json", "epochs_lstm.csv"] {
        let a = std::fs::read(dirs[0].join(name)).unwrap();
        let b = std::fs::read(dirs[1].join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
    let epochs = std::fs::read_to_string(dirs[0].join("epochs_lstm.csv")).unwrap();
    assert_eq!(
        epochs.lines().count(),
        3,
        "header plus the 2 configured epochs"
    );
}

#[test]
fn stem_words_and_trace_modes_work() {
    let out = run(&["stem", "bermain", "kemenangannya"], &[]);
    assert_ok(&out, "stem words");
    let text = stdout_of(&out);
    assert!(text.contains("bermain\tmain"));
    assert!(text.contains("kemenangannya\tmenang"));

    let out = run(&["stem", "--word", "kemenangannya"], &[]);
    assert_ok(&out, "stem --word");
    let text = stdout_of(&out);
    assert!(text.starts_with("input  kemenangannya"));
    assert!(text.trim_end().ends_with("output menang"));

    let out = run(&["stem"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_unknown_keys_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.toml");
    std::fs::write(&config, "[lstm]\nhidden_units = 64\n").unwrap();
    let out = run(&["stats", "--config", config.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("invalid config"));
}
