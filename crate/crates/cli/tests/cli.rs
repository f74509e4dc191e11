use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn leakscope(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leakscope"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = leakscope(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn deanon_writes_run_rows_and_mean() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["deanon", "--condition", "T_I", "--posts-seen", "200", "--anon", "5", "-o", "o"]);
    let csv = fs::read_to_string(dir.path().join("o/deanon.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "condition,posts_seen,num_anon_posts,run,accuracy,micro_f1,excluded_users");
    assert_eq!(lines.len(), 1 + 10 + 1);
    assert!(lines[1..11].iter().all(|l| l.starts_with("T_I,200,5,")));
    assert!(lines[11].starts_with("T_I,200,5,mean,"));
}

#[test]
fn sweep_has_baseline_and_eleven_lambdas() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sweep", "--sim-seeds", "1", "-o", "o"]);
    let csv = fs::read_to_string(dir.path().join("o/sweep.csv")).unwrap();
    let labels: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels.len(), 12);
    assert_eq!(labels[0], "baseline");
    assert_eq!(labels[1..], ["0.0", "0.1", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "0.9", "1.0"]);
}

#[test]
fn reruns_are_byte_identical_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("leakscope.conf"), "# small grid\nposts_seen = 50,100\nruns = 3\nsim_seeds = 2\n").unwrap();
    for out in ["a", "b"] {
        ok(dir.path(), &["deanon", "--condition", "TT,T_I", "-o", out]);
        ok(dir.path(), &["curves", "-o", out]);
        ok(dir.path(), &["venues", "-o", out]);
    }
    for f in ["deanon.csv", "manifest-deanon.conf", "curves.csv", "manifest-curves.conf", "venues.csv"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let manifest = fs::read_to_string(dir.path().join("a/manifest-deanon.conf")).unwrap();
    assert!(manifest.contains("runs = 3"));
    assert!(manifest.contains("conditions = TT,T_I"));
    let replay = leakscope(dir.path(), &["replay", "a/manifest-deanon.conf", "-o", "c"]);
    assert!(replay.status.success(), "{}", String::from_utf8_lossy(&replay.stderr));
    assert!(String::from_utf8_lossy(&replay.stdout).contains("match deanon.csv"));
}

#[test]
fn tampered_manifest_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["venues", "-o", "a"]);
    let path = dir.path().join("a/manifest-venues.conf");
    let text = fs::read_to_string(&path).unwrap().replace("band_max = 0.35", "band_max = 0.5");
    fs::write(&path, text).unwrap();
    assert!(!leakscope(dir.path(), &["replay", "a/manifest-venues.conf", "-o", "c"]).status.success());
}

#[test]
fn generated_corpus_ingests_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["generate", "--users", "8", "-o", "g"]);
    ok(dir.path(), &["ingest", "g", "-o", "i"]);
    assert_eq!(
        fs::read(dir.path().join("g/corpus.jsonl")).unwrap(),
        fs::read(dir.path().join("i/corpus.jsonl")).unwrap()
    );
    let manifest = fs::read_to_string(dir.path().join("i/manifest-ingest.conf")).unwrap();
    assert!(manifest.contains("corpus_sha256 = "));
}

#[test]
fn failures_exit_nonzero_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["deanon", "--condition", "XX", "-o", "bad"][..],
        &["sweep", "--venues", "Nowhere", "-o", "bad"],
        &["venues", "--corpus", "missing.jsonl", "-o", "bad"],
        &["--set", "bogus=1", "venues", "-o", "bad"],
        &["sweep", "--lambda", "2", "-o", "bad"],
    ] {
        let out = leakscope(dir.path(), args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(!dir.path().join("bad").exists(), "{args:?}");
    }
    fs::write(dir.path().join("bad.jsonl"), "{\"id\": 1}\n").unwrap();
    assert!(!leakscope(dir.path(), &["ingest", "bad.jsonl", "-o", "bad"]).status.success());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("leakscope.conf"), "seed = 5\nband_max = 0.5\n").unwrap();
    ok(dir.path(), &["--seed", "9", "venues", "-o", "o"]);
    let manifest = fs::read_to_string(dir.path().join("o/manifest-venues.conf")).unwrap();
    assert!(manifest.contains("seed = 9\n"));
    assert!(manifest.contains("band_max = 0.5\n"));
}

#[test]
fn score_prints_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let out = leakscope(dir.path(), &["score", "--user", "u0001", "--text", "bakery zoo museum", "--venue", "Zoo"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["lambda"], 0.1);
    assert!(v["novelty"].as_f64().unwrap() > 0.0);
    let bad = leakscope(dir.path(), &["score", "--user", "nobody", "--text", "zoo", "--venue", "Zoo"]);
    assert!(!bad.status.success());
}
