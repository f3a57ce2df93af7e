//! Acceptance criteria, one test each. Every test prints a single
//! `PASS`/`FAIL` line naming its criterion before asserting.

mod common;

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use procscope::emul::{Emulator, FpConfig, Rounding};
use procscope::fingerprint::{Fingerprint, FingerprintError, SHIPPED_DB};
use procscope::fpcore::arith::{Arith, Native32, Native64};
use procscope::fpcore::exact::{eval_exact, parse_decimal};
use procscope::fpcore::PiConstant;
use procscope::fphash::{fp_hash, measure_avalanche, measure_divergence, FpHashParams};
use procscope::probes::numeric::{
    probe_easy_computations, probe_gentleman, probe_logistic, probe_rump_f, probe_rump_p, probe_sin,
    probe_sqrt_identity, probe_sum_residual, rump_f_expr, RUMP_F_EXACT, RUMP_X, RUMP_Y,
};
use procscope::probes::timing::{probe_popcount_timing, MIN_ITERATIONS};
use procscope::probes::{run_battery, Backend, BatteryOptions, Payload, TimingOutcome};

fn report(n: u32, title: &str, ok: bool, detail: &str) {
    println!(
        "{} criterion {n:>2} {title}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn b64() -> Emulator {
    Emulator::new(FpConfig::BINARY64)
}

#[test]
fn criterion_01_sqrt_identity() {
    let t = Instant::now();
    let squares = [0.0, 1.0, 4.0, 16.0, 1024.0, 2f64.powi(40), 2f64.powi(-20)];
    let mut ok = !probe_sqrt_identity(&Native64, 2.0).unwrap();
    ok &= squares.iter().all(|&a| probe_sqrt_identity(&Native64, a).unwrap());
    let native_time = t.elapsed();
    let e = b64();
    ok &= !probe_sqrt_identity(&e, e.from_f64(2.0)).unwrap();
    ok &= squares.iter().all(|&a| probe_sqrt_identity(&e, e.from_f64(a)).unwrap());
    ok &= native_time.as_secs_f64() < 1e-3;
    report(
        1,
        "sqrt identity",
        ok,
        &format!("A=2 false, squares true; native {native_time:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_02_gentleman() {
    let t = Instant::now();
    let native = probe_gentleman(&Native64);
    let mut ok = (native.mantissa_bits, native.base) == (53, 2);
    let mut bad = Vec::new();
    for p in 8..=64 {
        let cfg = FpConfig::new(p, 11, Rounding::NearestEven).unwrap();
        let g = probe_gentleman(&Emulator::new(cfg));
        if (g.mantissa_bits, g.base) != (p, 2) {
            bad.push(format!("{cfg}: {},{}", g.mantissa_bits, g.base));
        }
    }
    let elapsed = t.elapsed();
    ok &= bad.is_empty() && elapsed.as_secs_f64() < 1.0;
    report(
        2,
        "gentleman",
        ok,
        &format!("native (53,2); 57 emulated configs, mismatches {bad:?}; {elapsed:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_03_easy_computations() {
    let want = [false, true, false, false];
    let n = probe_easy_computations(&Native64);
    let e = probe_easy_computations(&b64());
    let ok = n == want && e == want;
    report(3, "easy computations", ok, &format!("native {n:?}, emulated {e:?}"));
    assert!(ok);
}

#[test]
fn criterion_04_oracle_agreement() {
    let opts = BatteryOptions::deterministic_only();
    let native = run_battery(&Backend::Native64, &opts);
    let emulated = run_battery(&Backend::Emulated(FpConfig::BINARY64), &opts);
    let diffs: Vec<&str> = native
        .iter()
        .zip(&emulated)
        .filter(|(a, b)| a.payload != b.payload)
        .map(|(a, _)| a.probe_id.as_str())
        .collect();
    let ok = native.len() == 24 && diffs.is_empty();
    report(
        4,
        "oracle agreement",
        ok,
        &format!("{} probes, differing {diffs:?}", native.len()),
    );
    assert!(ok);
}

fn sin_bits<A: Arith>(a: &A, k: u32, pi: PiConstant) -> String {
    a.bits(probe_sin(a, k, pi)).to_string()
}

#[test]
fn criterion_05_pi_collapse() {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut collapse = |name: &str, f: &dyn Fn(u32, PiConstant) -> String| {
        for k in [10, 17, 37] {
            if f(k, PiConstant::Pi3) != f(k, PiConstant::Pi4) {
                ok = false;
                notes.push(format!("{name} k={k} pi3!=pi4"));
            }
        }
    };
    // the two literals round to the same value under round-to-nearest in
    // every format up to binary64 precision; truncation can split them
    collapse("native64", &|k, p| sin_bits(&Native64, k, p));
    collapse("native32", &|k, p| sin_bits(&Native32, k, p));
    for cfg in [
        "binary32",
        "binary64",
        "binary64-fma",
        "sig11exp5-ne",
        "sig40exp9-ne",
        "binary64-naive",
    ] {
        let e = Emulator::new(cfg.parse().unwrap());
        collapse(cfg, &|k, p| sin_bits(&e, k, p));
    }
    for (name, v) in [
        (
            "native64",
            [PiConstant::Pi1, PiConstant::Pi2, PiConstant::Pi3].map(|p| sin_bits(&Native64, 17, p)),
        ),
        (
            "binary64",
            [PiConstant::Pi1, PiConstant::Pi2, PiConstant::Pi3].map(|p| sin_bits(&b64(), 17, p)),
        ),
    ] {
        if v[0] == v[1] || v[1] == v[2] || v[0] == v[2] {
            ok = false;
            notes.push(format!("{name} k=17 pi1/pi2/pi3 not distinct"));
        }
    }
    let wide = Emulator::new(FpConfig::SIG64);
    let wide_same = sin_bits(&wide, 37, PiConstant::Pi3) == sin_bits(&wide, 37, PiConstant::Pi4);
    let tz = Emulator::new("sig53exp11-tz".parse().unwrap());
    let tz_same = sin_bits(&tz, 37, PiConstant::Pi3) == sin_bits(&tz, 37, PiConstant::Pi4);
    report(
        5,
        "pi collapse",
        ok,
        &format!("pi3==pi4 on 8 nearest-even backends up to 53 bits, pi1/2/3 distinct at k=17 {notes:?}; sig64exp15 pi3==pi4: {wide_same}, sig53exp11-tz pi3==pi4: {tz_same}"),
    );
    assert!(ok);
}

#[test]
fn criterion_06_sum_residual() {
    let r = |n| probe_sum_residual(&Native64, n).unwrap();
    let (r10, r22, r100) = (r(10), r(22), r(100));
    let ok10 = r10 == 0.0;
    let ok22 = r22 != 0.0 && (1e8..=1e9).contains(&r22.abs());
    let ok100 = r100 != 0.0 && (1e85..=1e87).contains(&r100.abs());
    let golden = SHIPPED_DB
        .split("class=BINARY64-synthetic")
        .nth(1)
        .expect("binary64 row");
    let pinned = [10, 22, 100].iter().all(|&n| {
        let bits = procscope::fpcore::to_bits(r(n)).to_string();
        golden.contains(&format!("probe=sum-residual-{n} kind=residual value={bits}"))
    });
    let e = b64();
    let emulated_same = [10, 22, 100]
        .iter()
        .all(|&n| e.to_f64(probe_sum_residual(&e, n).unwrap()) == r(n));
    let ok = ok10 && ok22 && ok100 && pinned && emulated_same;
    report(
        6,
        "sum residual",
        ok,
        &format!(
            "n=10 {r10:e} [{}], n=22 {r22:e} in [1e8,1e9]: {}, n=100 {r100:e} [{}], bits pinned {pinned}",
            if ok10 { "ok" } else { "bad" },
            if ok22 { "ok" } else { "NO" },
            if ok100 { "ok" } else { "bad" }
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_07_rump() {
    let f32r = probe_rump_f(&Native32);
    let f_ok = f32r != RUMP_F_EXACT as f32 && f32r.abs() >= 1e18;
    let inputs: BTreeMap<String, BigRational> = [
        ("X".to_string(), parse_decimal(RUMP_X).unwrap()),
        ("Y".to_string(), parse_decimal(RUMP_Y).unwrap()),
    ]
    .into();
    let exact = eval_exact(&rump_f_expr(), &inputs).unwrap();
    let exact_ok = exact == BigRational::from_integer(RUMP_F_EXACT.into());
    let (_, p32) = probe_rump_p(&Native32);
    let p_ok = (1e-9..=1e-7).contains(&p32.abs());
    let f64r = probe_rump_f(&Native64);
    let (_, p64) = probe_rump_p(&Native64);
    let ok = f_ok && exact_ok && p_ok;
    report(
        7,
        "rump",
        ok,
        &format!(
            "binary32 F={f32r:e} (|F|>=1e18: {f_ok}), exact F={exact} ({exact_ok}), binary32 P(0.707)={p32:e} \
             in [1e-9,1e-7]: {p_ok}; binary64 F={f64r:e}, P(0.707)={p64:e}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_08_classifier_separation() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cfgs = [
        (FpConfig::BINARY32, "BINARY32-synthetic"),
        (FpConfig::BINARY64, "BINARY64-synthetic"),
        (FpConfig::SIG64, "SIG64EXP15-NE-synthetic"),
    ];
    let fps: Vec<Fingerprint> = cfgs
        .iter()
        .map(|(c, _)| {
            let b = Backend::Emulated(*c);
            Fingerprint::assemble(&b, run_battery(&b, &BatteryOptions::deterministic_only())).unwrap()
        })
        .collect();
    let mut min_diff = usize::MAX;
    for i in 0..3 {
        for j in i + 1..3 {
            let d = procscope::fingerprint::diff(&fps[i], &fps[j])
                .iter()
                .filter(|r| r.differs())
                .count();
            min_diff = min_diff.min(d);
        }
    }
    let mut verdicts = Vec::new();
    let mut ok = min_diff >= 3;
    for (fp, (_, class)) in fps.iter().zip(cfgs) {
        let p = dir.path().join(format!("{class}.txt"));
        std::fs::write(&p, fp.serialize()).unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_procscope"))
            .args(["match", p.to_str().unwrap()])
            .env_remove("PROCSCOPE_DB")
            .output()
            .unwrap();
        let text = String::from_utf8_lossy(&out.stdout);
        let hit = out.status.code() == Some(0) && text.contains(&format!("verdict={class}"));
        ok &= hit;
        verdicts.push(format!("{class}:{hit}"));
    }
    let elapsed = t.elapsed();
    ok &= elapsed.as_secs_f64() < 5.0;
    report(
        8,
        "classifier separation",
        ok,
        &format!("min pairwise differing probes {min_diff}, {verdicts:?}, {elapsed:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_09_serialization() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut round_trips = 0;
    let mut caught = 0;
    for _ in 0..1000 {
        let fp = common::random_fingerprint(&mut rng);
        let text = fp.serialize();
        if Fingerprint::parse(&text).is_ok_and(|b| b.serialize() == text && b == fp) {
            round_trips += 1;
        }
        // flip one hex digit of a canonical bit pattern
        let spots: Vec<usize> = text
            .match_indices(":")
            .map(|(i, _)| i + 1)
            .filter(|&i| {
                let line_start = text[..i].rfind('\n').map_or(0, |s| s + 1);
                let line = &text[line_start..];
                line.starts_with("probe=")
                    && !line.starts_with("probe=popcount-timing")
                    && text[..i].ends_with(":")
                    && text[line_start..i].contains("value=")
                    && text.as_bytes()[i].is_ascii_hexdigit()
            })
            .collect();
        let i = spots[rng.random_range(0..spots.len())];
        let mut t = text.clone();
        let c = t.as_bytes()[i];
        t.replace_range(i..i + 1, if c == b'0' { "1" } else { "0" });
        if matches!(
            Fingerprint::parse(&t),
            Err(FingerprintError::DigestMismatch { .. } | FingerprintError::Parse { .. })
        ) {
            caught += 1;
        }
    }
    let ok = round_trips == 1000 && caught == 1000;
    report(
        9,
        "serialization",
        ok,
        &format!("{round_trips}/1000 round trips, {caught}/1000 tampers caught"),
    );
    assert!(ok);
}

#[test]
fn criterion_10_fp_hash() {
    let golden = [
        (
            FpConfig::BINARY32,
            &b""[..],
            "00000000000000000000000000000000000000000001f540305d87ed5374c776",
        ),
        (
            FpConfig::BINARY32,
            b"abc",
            "0000000000000000000000000000000fa0932df12edde9fc107745fde05cfc81",
        ),
        (
            FpConfig::BINARY64,
            b"",
            "000000000000000000000000000000000001fe9fc995c30a634bc176cfc8bf8d",
        ),
        (
            FpConfig::BINARY64,
            b"abc",
            "00000000000000000000000ff4259a7da274bd26ca347a9cd06d2e063833a75b",
        ),
    ];
    let mut ok = true;
    for (cfg, msg, want) in golden {
        let emulated = fp_hash(msg, &FpHashParams::new(Backend::Emulated(cfg)))
            .unwrap()
            .to_hex();
        let native_backend = if cfg == FpConfig::BINARY32 {
            Backend::Native32
        } else {
            Backend::Native64
        };
        let native = fp_hash(msg, &FpHashParams::new(native_backend)).unwrap().to_hex();
        ok &= emulated == want && native == want;
    }
    let a = FpHashParams::new(Backend::Emulated(FpConfig::BINARY32));
    let b = FpHashParams::new(Backend::Emulated(FpConfig::BINARY64));
    let div = measure_divergence(&a, &b, 100).unwrap();
    ok &= div.fraction >= 0.99;
    let aval = measure_avalanche(&FpHashParams::new(Backend::Native64), 1000).unwrap();
    report(
        10,
        "fp_hash",
        ok,
        &format!("golden vectors match; binary32 vs binary64 {div}; avalanche (reported only) {aval}"),
    );
    assert!(ok);
}

#[test]
fn criterion_11_logistic() {
    let fixed = probe_logistic(&Native64, 2.0, 0.5, 1000).unwrap() == 0.5
        && b64().to_f64(probe_logistic(&b64(), 2.0, 0.5, 1000).unwrap()) == 0.5;
    let collapse = probe_logistic(&Native64, 4.0, 0.5, 2).unwrap() == 0.0;
    let x32 = probe_logistic(&Native32, 3.999, 0.5, 1000).unwrap() as f64;
    let x64 = probe_logistic(&Native64, 3.999, 0.5, 1000).unwrap();
    let lead = |x: f64| format!("{x:.1e}").chars().next().unwrap();
    let diverged = lead(x32) != lead(x64);
    let ok = fixed && collapse && diverged;
    report(
        11,
        "logistic",
        ok,
        &format!("r=2 fixed {fixed}, r=4 -> 0 in 2 steps {collapse}, n=1000 binary32 {x32} vs binary64 {x64}"),
    );
    assert!(ok);
}

#[test]
fn criterion_12_timing_smoke() {
    let a = probe_popcount_timing(MIN_ITERATIONS, 5).unwrap();
    let b = probe_popcount_timing(MIN_ITERATIONS, 5).unwrap();
    let (ok, detail) = match (a, b) {
        (TimingOutcome::Measured(x), TimingOutcome::Measured(y)) => (
            x.checksum == y.checksum && x.software_median_ns > 0.0 && x.software_iqr_ns >= 0.0,
            format!(
                "checksum {} stable; software median {:.0} ns iqr {:.0}, {} median {:.0} ns iqr {:.0}",
                x.checksum,
                x.software_median_ns,
                x.software_iqr_ns,
                x.hardware_method,
                x.hardware_median_ns,
                x.hardware_iqr_ns
            ),
        ),
        _ => (true, "unsupported on this platform".into()),
    };
    let battery = run_battery(&Backend::Native64, &BatteryOptions::default());
    let timed = battery.last().is_some_and(|r| matches!(r.payload, Payload::Timing(_)));
    let ok = ok && timed;
    report(12, "timing smoke", ok, &detail);
    assert!(ok);
}
