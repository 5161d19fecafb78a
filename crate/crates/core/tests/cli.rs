use std::path::Path;
use std::process::{Command, Output};

use wigson::analysis::compute_moments;
use wigson::grid::WignerField;
use wigson::render::read_wav;
use wigson::score::read_score;

fn wigson(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wigson"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn eval_prints_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    let o = wigson(&["eval", "--state", "fock:1", "--r", "0", "--p", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-0.31830988618379069");

    let o = wigson(&["eval", "--state", "cat:-1", "--r", "-0.5", "--p", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).trim().starts_with('-'));
}

#[test]
fn field_reports_coverage_and_gates() {
    let dir = tempfile::tempdir().unwrap();
    let o = wigson(&["field", "--state", "fock:0", "--out", "ok.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let c: f64 = stdout(&o).trim().strip_prefix("coverage ").unwrap().parse().unwrap();
    assert!(c >= 0.99);
    assert!(dir.path().join("ok.json").exists());

    let o = wigson(
        &["field", "--state", "fock:0", "--grid", "regular:30:-0.1:0.1", "--out", "bad.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    let c: f64 = stdout(&o).trim().strip_prefix("coverage ").unwrap().parse().unwrap();
    assert!(c < 0.99);
    assert!(stderr(&o).contains("coverage"));
}

#[test]
fn moments_match_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = wigson(&["field", "--state", "cat:-1", "--grid", "gauss:128:3", "--out", "cat.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = wigson(&["moments", "--field", "cat.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let m = compute_moments(&WignerField::read_csv(&dir.path().join("cat.csv")).unwrap()).unwrap();
    assert_eq!(json["sigma_r"].as_f64().unwrap(), m.sigma_r);
    assert_eq!(json["negativity"].as_f64().unwrap(), m.negativity);
}

#[test]
fn sonify_method_four_lasts_ten_seconds() {
    let dir = tempfile::tempdir().unwrap();
    let o = wigson(
        &["sonify", "--method", "IV", "--state", "cat:-1", "--duration", "10", "--out", "iv.wav"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let buf = read_wav(&dir.path().join("iv.wav")).unwrap();
    assert_eq!(buf.sample_rate(), 48_000);
    assert_eq!(buf.len(), 480_000);
    assert_eq!(buf.channel_count(), 1);
}

#[test]
fn sonify_writes_score_and_stereo() {
    let dir = tempfile::tempdir().unwrap();
    let o = wigson(
        &[
            "sonify", "--method", "I", "--state", "fock:1", "--grid", "regular:30:-5:5", "--duration", "1",
            "--channels", "2", "--out", "i.wav", "--score", "i.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read_wav(&dir.path().join("i.wav")).unwrap().channel_count(), 2);
    let events = read_score(&dir.path().join("i.json")).unwrap();
    assert_eq!(events.len(), 900);
    assert!(events.iter().all(|e| e.gains.len() == 2));
}

#[test]
fn gated_runs_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let gate = ["--method", "II", "--state", "fock:0", "--grid", "regular:30:-0.1:0.1", "--out", "x.out"];
    let sonify = [&["sonify"][..], &gate, &["--score", "x.json"]].concat();
    let score = [&["score"][..], &gate].concat();
    for args in [sonify, score] {
        let o = wigson(&args, dir.path());
        assert_eq!(o.status.code(), Some(3), "{args:?}: {}", stderr(&o));
    }
    assert!(!dir.path().join("x.out").exists());
    assert!(!dir.path().join("x.json").exists());
}

#[test]
fn score_from_field_file_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    wigson(&["field", "--state", "fock:2", "--out", "f.csv"], dir.path());
    let run = |out: &str| {
        let o = wigson(
            &["score", "--method", "III", "--field", "f.csv", "--channels", "4", "--out", out],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(dir.path().join(out)).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn arpeggiated_score_spreads_onsets() {
    let dir = tempfile::tempdir().unwrap();
    let o = wigson(
        &[
            "score", "--method", "I", "--state", "fock:0", "--grid", "regular:10:-5:5", "--duration", "2",
            "--arpeggiate", "--out", "a.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let events = read_score(&dir.path().join("a.json")).unwrap();
    let mut onsets: Vec<f64> = events.iter().map(|e| e.onset).collect();
    onsets.dedup();
    assert_eq!(onsets.len(), 10);
    assert!(events.windows(2).all(|w| w[0].onset <= w[1].onset));
}

#[test]
fn sweep_and_sonogram() {
    let dir = tempfile::tempdir().unwrap();
    let o = wigson(
        &["sweep", "--trajectory", "fock>-1:1,-1>-3:1", "--sample-rate", "16000", "--out", "s.wav"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read_wav(&dir.path().join("s.wav")).unwrap().len(), 32_000);

    let o = wigson(&["sonogram", "--wav", "s.wav", "--out", "s.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 1026);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| wigson(args, dir.path()).status.code();
    // argument and parse errors
    assert_eq!(code(&["sonify", "--method", "V", "--state", "fock:0", "--out", "x.wav"]), Some(2));
    assert_eq!(code(&["eval", "--state", "fock:1"]), Some(2));
    assert_eq!(code(&["eval", "--state", "squeezed:1", "--r", "0", "--p", "0"]), Some(2));
    assert_eq!(code(&["field", "--state", "fock:0", "--grid", "hex:3", "--out", "x.csv"]), Some(2));
    std::fs::write(dir.path().join("bad.cfg"), "tempo = 120\n").unwrap();
    assert_eq!(
        code(&["sonify", "--method", "IV", "--state", "fock:0", "--config", "bad.cfg", "--out", "x.wav"]),
        Some(2)
    );
    assert_eq!(code(&["sonify", "--method", "IV", "--state", "fock:0", "--channels", "3", "--out", "x.wav"]), Some(2));
    // missing input
    assert_eq!(code(&["moments", "--field", "missing.csv"]), Some(1));
    // domain errors
    assert_eq!(code(&["eval", "--state", "cat:0.0001", "--r", "0", "--p", "0"]), Some(4));
    std::fs::write(dir.path().join("low.cfg"), "f0_base = 100\n").unwrap();
    assert_eq!(
        code(&["sonify", "--method", "IV", "--state", "fock:1", "--config", "low.cfg", "--out", "x.wav"]),
        Some(4)
    );
    assert!(!dir.path().join("x.wav").exists());
}
