use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stid_cli::config::RunConfig;
use stid_core::data::load_csv;

fn stid(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stid"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Writes a small spatial dataset and returns its path.
fn synth(dir: &Path, mode: &str, name: &str) -> PathBuf {
    let path = dir.join(name);
    let out = stid(&["synth", "--mode", mode, "--days", "6", "--out", path.to_str().unwrap()], dir);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    path
}

const FAST: [&str; 4] = ["--set", "epochs=2", "--set", "window_stride=6"];

#[test]
fn synth_output_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = stid(&["synth", "--mode", "spatial", "--gap", "10", "--days", "14", "--out", "s.csv"], dir.path());
    assert_eq!(code(&out), 0);
    let series = load_csv(&dir.path().join("s.csv")).unwrap();
    assert_eq!(series.num_vars(), 2);
    assert_eq!(series.num_slots(), 14 * 48);
}

#[test]
fn train_writes_outputs_and_evaluate_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "spatial", "d.csv");
    let before = fs::read(&data).unwrap();
    let mut args = vec!["train", "--dataset", data.to_str().unwrap(), "--out", "run"];
    args.extend(FAST);
    let out = stid(&args, dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("epoch")).count(), 2);
    let run = dir.path().join("run");
    for f in ["model.stid", "train_report.csv", "test_report.csv", "config.txt"] {
        assert!(run.join(f).is_file(), "{f} missing");
    }
    assert_eq!(fs::read(&data).unwrap(), before, "input dataset modified");

    let mut args = vec!["evaluate", "--config", "run/config.txt", "--checkpoint", "run/model.stid", "--split", "test"];
    args.extend(["--out", "eval"]);
    let out = stid(&args, dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        fs::read_to_string(run.join("test_report.csv")).unwrap(),
        fs::read_to_string(dir.path().join("eval/eval_test.csv")).unwrap()
    );

    let out = stid(&["evaluate", "--config", "run/config.txt", "--baseline", "hi", "--out", "eval"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let hi = fs::read_to_string(dir.path().join("eval/hi_test.csv")).unwrap();
    assert!(hi.starts_with("horizon,mae,rmse,mape_pct,valid_count\n@3,"));

    let out = stid(&["export-embeddings", "--checkpoint", "run/model.stid", "--out", "emb"], dir.path());
    assert_eq!(code(&out), 0);
    let rows = |n: &str| fs::read_to_string(dir.path().join("emb").join(n)).unwrap().lines().count() - 1;
    assert_eq!((rows("E.csv"), rows("T_tid.csv"), rows("T_diw.csv")), (2, 48, 7));
}

#[test]
fn echoed_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "temporal", "t.csv");
    let mut args = vec!["train", "--dataset", data.to_str().unwrap(), "--out", "a", "--seed", "4"];
    args.extend(FAST);
    assert_eq!(code(&stid(&args, dir.path())), 0);
    let echoed = RunConfig::from_file(&dir.path().join("a/config.txt")).unwrap();
    assert_eq!((echoed.seed, echoed.epochs, echoed.window_stride), (4, 2, 6));

    let out = stid(&["train", "--config", "a/config.txt", "--out", "b"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let a = fs::read(dir.path().join("a/model.stid")).unwrap();
    let b = fs::read(dir.path().join("b/model.stid")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = stid(&["train", "--dataset", "missing.csv"], dir.path());
    assert_eq!(code(&out), 2);

    let data = synth(dir.path(), "spatial", "d.csv");
    let out = stid(&["train", "--dataset", data.to_str().unwrap(), "--set", "lr=abc"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("lr"), "{}", stderr(&out));

    fs::write(dir.path().join("bad.cfg"), "hidden = 8\n").unwrap();
    let out = stid(&["train", "--config", "bad.cfg"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("hidden"));

    fs::write(dir.path().join("ragged.csv"), "# interval_minutes=30\na,b\n1,2\n3\n").unwrap();
    let out = stid(&["train", "--dataset", "ragged.csv"], dir.path());
    assert_eq!(code(&out), 2);

    assert_eq!(code(&stid(&["no-such-command"], dir.path())), 1);
    assert_eq!(code(&stid(&["--help"], dir.path())), 0);
}

#[test]
fn checkpoint_from_other_dataset_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let two = synth(dir.path(), "spatial", "two.csv");
    let mut args = vec!["train", "--dataset", two.to_str().unwrap(), "--out", "run"];
    args.extend(FAST);
    assert_eq!(code(&stid(&args, dir.path())), 0);

    // Three variables: spatial data with an extra copied column.
    let text = fs::read_to_string(&two).unwrap();
    let widened: String = text
        .lines()
        .map(|l| {
            let last = l.rsplit(',').next().unwrap();
            if l.starts_with('#') {
                format!("{l}\n")
            } else if l.starts_with("timestamp") {
                format!("{l},var_2\n")
            } else {
                format!("{l},{last}\n")
            }
        })
        .collect();
    fs::write(dir.path().join("three.csv"), widened).unwrap();
    let out = stid(&["evaluate", "--dataset", "three.csv", "--checkpoint", "run/model.stid", "--out", "e"], dir.path());
    assert_eq!(code(&out), 1);
    let msg = stderr(&out);
    assert!(msg.contains("N=2") && msg.contains("N=3"), "{msg}");
}

#[test]
fn ablate_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "spatial", "d.csv");
    let mut args = vec!["ablate", "--dataset", data.to_str().unwrap(), "--out", "abl"];
    args.extend(FAST);
    let out = stid(&args, dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("abl/ablation.csv")).unwrap();
    let names: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["full", "w/o E", "w/o T^TiD", "w/o T^DiW"]);

    let out = stid(
        &["bench", "--dataset", data.to_str().unwrap(), "--out", "bench", "--epochs", "3"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].parse::<f64>().unwrap() > 0.0);
    let per_epoch = fs::read_to_string(dir.path().join("bench/bench.csv")).unwrap();
    assert_eq!(per_epoch.lines().count(), 4);
}
