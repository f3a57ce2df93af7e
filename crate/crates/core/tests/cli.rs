use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use procscope::emul::FpConfig;
use procscope::fingerprint::{DbEntry, Expectation, Fingerprint, Provenance, SignatureDb};
use procscope::fphash::{fp_hash, FpHashParams};
use procscope::probes::{run_battery, Backend, BatteryOptions, PayloadKind};

fn procscope(args: &[&str], env_db: Option<&Path>, stdin: &[u8]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_procscope"));
    cmd.args(args).env_remove("PROCSCOPE_DB");
    if let Some(db) = env_db {
        cmd.env("PROCSCOPE_DB", db);
    }
    let mut child = cmd
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = procscope(args, None, b"");
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_a_verifiable_fingerprint() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("fp.txt");
    let shown = ok(&[
        "run",
        "--backend",
        "native64",
        "--no-timing",
        "--format",
        "fp",
        "-o",
        s(&p),
    ]);
    let text = fs::read_to_string(&p).unwrap();
    assert_eq!(shown, text);
    assert!(text.lines().last().unwrap().starts_with("digest="));
    Fingerprint::parse(&text).unwrap();
}

#[test]
fn run_with_emulated_backend_equals_the_oracle() {
    let shown = ok(&["run", "--backend", "sig24exp8-ne", "--format", "fp"]);
    let backend = Backend::Emulated(FpConfig::BINARY32);
    let oracle = Fingerprint::assemble(&backend, run_battery(&backend, &BatteryOptions::deterministic_only())).unwrap();
    assert_eq!(shown, oracle.serialize());
}

#[test]
fn unwritable_output_leaves_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("missing").join("fp.txt");
    let o = procscope(&["run", "--no-timing", "-o", s(&p)], None, b"");
    assert_eq!(code(&o), 3);
    assert!(!p.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

fn synthetic_fp(dir: &Path, cfg: &str) -> std::path::PathBuf {
    let p = dir.join(format!("{cfg}.txt"));
    ok(&["run", "--backend", cfg, "--format", "fp", "-o", s(&p)]);
    p
}

#[test]
fn match_against_builtin_db() {
    let dir = tempfile::tempdir().unwrap();
    for (cfg, class) in [
        ("binary32", "BINARY32-synthetic"),
        ("binary64", "BINARY64-synthetic"),
        ("sig64exp15-ne", "SIG64EXP15-NE-synthetic"),
    ] {
        let out = ok(&["match", s(&synthetic_fp(dir.path(), cfg))]);
        assert!(out.contains(&format!("verdict={class}")), "{out}");
    }
}

#[test]
fn ties_exit_one_and_env_overrides_db() {
    let dir = tempfile::tempdir().unwrap();
    let fp = synthetic_fp(dir.path(), "binary64");
    let row = |name: &str| {
        DbEntry::new(name, Provenance::Measured)
            .expect("gentleman", Expectation::parse(PayloadKind::IntPair, "53,2").unwrap())
    };
    let db = dir.path().join("tie.db");
    fs::write(
        &db,
        SignatureDb::new(vec![row("host-a"), row("host-b")])
            .unwrap()
            .serialize(),
    )
    .unwrap();

    let o = procscope(&["match", s(&fp)], Some(&db), b"");
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 1);
    assert!(out.contains("host-a") && out.contains("host-b") && out.contains("verdict=ambiguous"));

    // an explicit --db wins over the environment
    let o = procscope(&["match", s(&fp), "--db", "/nonexistent.db"], Some(&db), b"");
    assert_eq!(code(&o), 3);
}

#[test]
fn corrupted_files_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let fp = synthetic_fp(dir.path(), "binary64");
    let text = fs::read_to_string(&fp).unwrap();

    let bad_digest = dir.path().join("bad.txt");
    let i = text.rfind("digest=").unwrap() + 7;
    let mut t = text.clone();
    let c = if &t[i..i + 1] == "0" { "1" } else { "0" };
    t.replace_range(i..i + 1, c);
    fs::write(&bad_digest, t).unwrap();
    let o = procscope(&["match", s(&bad_digest)], None, b"");
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("digest mismatch"));

    let malformed = dir.path().join("malformed.txt");
    fs::write(&malformed, text.replacen("kind=int-pair", "kind=pair", 1)).unwrap();
    let o = procscope(&["match", s(&malformed)], None, b"");
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn diff_cases() {
    let dir = tempfile::tempdir().unwrap();
    let a = synthetic_fp(dir.path(), "binary32");
    let b = synthetic_fp(dir.path(), "binary64");
    let out = ok(&["diff", s(&a), s(&a)]);
    assert!(out.contains("0 difference(s)"));

    let o = procscope(&["diff", s(&a), s(&b)], None, b"");
    assert_eq!(code(&o), 1);
    let out = String::from_utf8(o.stdout).unwrap();
    let g = out.lines().find(|l| l.contains("gentleman")).unwrap();
    assert!(g.starts_with('*') && g.contains("24,2") && g.contains("53,2"), "{g}");

    let v2 = dir.path().join("v2.txt");
    fs::write(&v2, fs::read_to_string(&a).unwrap().replacen(" v1 ", " v2 ", 1)).unwrap();
    assert_eq!(code(&procscope(&["diff", s(&a), s(&v2)], None, b"")), 2);
}

#[test]
fn hash_cases() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("msg");
    fs::write(&f, b"the quick brown fox").unwrap();
    let one = ok(&["hash", s(&f)]);
    assert_eq!(one, ok(&["hash", s(&f)]));
    assert_eq!(one.trim().len(), 64);

    let empty = procscope(&["hash", "--backend", "binary64"], None, b"");
    assert_eq!(code(&empty), 0);
    let golden = fp_hash(b"", &FpHashParams::new(Backend::Emulated(FpConfig::BINARY64))).unwrap();
    assert_eq!(String::from_utf8(empty.stdout).unwrap().trim(), golden.to_hex());

    let cmp = ok(&["hash", s(&f), "--backend", "binary32", "--compare", "binary64"]);
    assert!(cmp.contains("binary32") && cmp.contains("binary64") && cmp.contains("hamming"));

    let o = procscope(&["hash", "/nonexistent/input"], None, b"");
    assert_eq!(code(&o), 3);
    let o = procscope(&["hash", "--r", "2.0"], None, b"");
    assert_eq!(code(&o), 2);
}

#[test]
fn emulate_sweep_writes_a_database() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("sweep.db");
    ok(&["emulate-sweep", "--configs", "binary32,sig11exp5-ne", "-o", s(&p)]);
    let db = SignatureDb::parse(&fs::read_to_string(&p).unwrap()).unwrap();
    let names: Vec<&str> = db.entries().iter().map(|e| e.class.as_str()).collect();
    assert_eq!(names, ["BINARY32-synthetic", "SIG11EXP5-NE-synthetic"]);
    assert!(db
        .entries()
        .iter()
        .all(|e| e.provenance == Provenance::SyntheticEmulated));

    let o = procscope(&["emulate-sweep", "--configs", "sig7exp3"], None, b"");
    assert_eq!(code(&o), 2);
}
