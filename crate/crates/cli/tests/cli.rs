use std::io::Write;
use std::process::{Command, Output};

use knotchi::laurent::LaurentPoly;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_knotchi"))
}

fn run_with_cache(cache: &std::path::Path, args: &[&str]) -> Output {
    bin()
        .env("KNOTCHI_CACHE", cache)
        .args(args)
        .output()
        .expect("spawn knotchi")
}

fn run_nocache(args: &[&str]) -> Output {
    let mut all = vec!["--no-cache"];
    all.extend_from_slice(args);
    bin().args(&all).output().expect("spawn knotchi")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn frozen_examples() {
    let o = run_nocache(&["alex", "--braid", "1 1 1", "--strands", "2", "--symmetrize"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "{\"delta\":\"t - 1 + t^-1\"}\n");

    let o = run_nocache(&["unknot-chi", "--slope", "-5/7"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "{\"chi\":-7,\"trace\":[[3,-2],[4,-3]]}\n");

    let o = run_nocache(&[
        "degree", "--euler", "0", "--sigma", "0", "--b1", "0", "0", "--b0", "1", "1",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "{\"parity\":0}\n");
}

#[test]
fn exit_codes() {
    // Domain error: machine-readable object, exit 1.
    let o = run_nocache(&["ncf", "--y", "4", "--z", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["error"]["kind"], "NotCoprime");

    // Usage errors: exit 2.
    let o = run_nocache(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run_nocache(&["alex", "--braid", "1 1 1"]); // missing --strands
    assert_eq!(o.status.code(), Some(2));

    // A knot-only operation on a link is a domain error with the inner name.
    let o = run_nocache(&["chi-knot", "--pd", "X(1,3,2,4) X(3,1,4,2)"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["error"]["kind"], "NotAKnot");
}

#[test]
fn alex_round_trip() {
    // --raw-json output re-parses to exactly the library value.
    let o = run_nocache(&[
        "--raw-json", "alex", "--braid", "1 -2 1 -2", "--strands", "3", "--symmetrize",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let from_cli = LaurentPoly::from_json(&v["delta"]).unwrap();

    let d = knotchi::linkdiag::parse_braid("1 -2 1 -2", 3).unwrap();
    let lib = knotchi::alexander::knot_delta_of_diagram(&d).unwrap();
    assert_eq!(from_cli, lib);

    // The pretty form re-parses to the same polynomial too.
    let o = run_nocache(&["alex", "--braid", "1 -2 1 -2", "--strands", "3", "--symmetrize"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let pretty = LaurentPoly::parse(v["delta"].as_str().unwrap(), 1).unwrap();
    assert_eq!(pretty, lib);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let args = ["alex", "--braid", "1 1 1", "--strands", "2", "--symmetrize"];

    let first = run_with_cache(&cache, &args);
    assert!(first.status.success());
    assert!(cache.exists(), "cache file created");

    // Second identical invocation: byte-identical output from the cache.
    let second = run_with_cache(&cache, &args);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);

    // The stored value really is the output line.
    let text = std::fs::read_to_string(&cache).unwrap();
    let entry: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(
        format!("{}\n", entry["value"].as_str().unwrap()),
        stdout(&first)
    );
}

#[test]
fn cache_corruption_recovers() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    std::fs::write(&cache, "this is not json\n").unwrap();

    let o = run_with_cache(&cache, &["parity", "--dots", "2", "-1", "-1"]);
    assert_eq!(o.status.code(), Some(0), "corruption must not fail the run");
    assert_eq!(stdout(&o), "{\"odd\":2}\n");
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(err.contains("corrupt"), "expected a warning, got: {err}");
}

#[test]
fn cache_version_bump_invalidates() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    // A well-formed entry from an older version must be ignored (not used,
    // not warned about), so the fresh run recomputes the true answer.
    std::fs::write(
        &cache,
        "{\"key\":\"deadbeef\",\"value\":\"{\\\"odd\\\":999}\",\"version\":\"0.0.0\",\"created_at\":0}\n",
    )
    .unwrap();
    let o = run_with_cache(&cache, &["parity", "--dots", "2", "-1", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "{\"odd\":2}\n");
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(!err.contains("corrupt"), "stale != corrupt: {err}");
}

#[test]
fn no_cache_flag_bypasses() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let o = bin()
        .env("KNOTCHI_CACHE", &cache)
        .args(["--no-cache", "parity", "--dots", "2", "-1", "-1"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(!cache.exists(), "--no-cache must not touch the store");
}

#[test]
fn batch_mode() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let batch = dir.path().join("batch.jsonl");
    let mut f = std::fs::File::create(&batch).unwrap();
    writeln!(f, "[\"unknot-chi\",\"--slope\",\"-5/7\"]").unwrap();
    writeln!(f, "[\"alex\",\"--braid\",\"1 1 1\",\"--strands\",\"2\",\"--symmetrize\"]").unwrap();
    writeln!(f, "[\"ncf\",\"--y\",\"7\",\"--z\",\"5\"]").unwrap();
    drop(f);

    let run = |jobs: &str| {
        bin()
            .env("KNOTCHI_CACHE", &cache)
            .args(["--batch", batch.to_str().unwrap(), "--jobs", jobs])
            .output()
            .unwrap()
    };
    let serial = run("1");
    assert!(serial.status.success());
    let lines: Vec<String> = stdout(&serial).lines().map(str::to_string).collect();
    assert_eq!(
        lines,
        vec![
            "{\"chi\":-7,\"trace\":[[3,-2],[4,-3]]}",
            "{\"delta\":\"t - 1 + t^-1\"}",
            "{\"entries\":[-2,-2,-3],\"value\":\"-7/5\"}",
        ]
    );
    // Parallel run preserves input order and bytes.
    let parallel = run("4");
    assert!(parallel.status.success());
    assert_eq!(serial.stdout, parallel.stdout);

    // A failing line yields exit 1 but the others still print.
    let mut f = std::fs::File::create(&batch).unwrap();
    writeln!(f, "[\"ncf\",\"--y\",\"4\",\"--z\",\"2\"]").unwrap();
    writeln!(f, "[\"parity\",\"--dots\",\"2\",\"-1\",\"-1\"]").unwrap();
    drop(f);
    let o = run("2");
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("{\"odd\":2}"));
}
