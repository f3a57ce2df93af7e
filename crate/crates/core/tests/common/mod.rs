#![allow(dead_code)]

use rand::{Rng, RngCore};

use procscope::fingerprint::Fingerprint;
use procscope::fpcore::BitPattern;
use procscope::probes::{Payload, PayloadKind, ProbeId, ProbeResult, TimingOutcome, TimingStats};

const BACKENDS: [&str; 5] = [
    "native-binary64",
    "native-binary32",
    "binary32",
    "sig64exp15-ne",
    "sig11exp5-tz-fma",
];

fn pattern(rng: &mut impl RngCore, width: u32) -> BitPattern {
    let raw = ((rng.next_u64() as u128) << 64 | rng.next_u64() as u128) & ((1u128 << width) - 1);
    BitPattern::from_raw(width, raw).unwrap()
}

fn payload(rng: &mut impl Rng, kind: PayloadKind, width: u32) -> Payload {
    if rng.random_ratio(1, 40) {
        return Payload::Error(format!(
            "domain error: case {} = {}%",
            rng.random::<u16>(),
            rng.random::<u8>()
        ));
    }
    match kind {
        PayloadKind::Bool => Payload::Bool(rng.random()),
        PayloadKind::Bools => Payload::Bools((0..4).map(|_| rng.random()).collect()),
        PayloadKind::Bits => Payload::Bits(pattern(rng, width)),
        PayloadKind::Residual => Payload::Residual(pattern(rng, width)),
        PayloadKind::ResidualPair => Payload::ResidualPair(pattern(rng, width), pattern(rng, width)),
        PayloadKind::IntPair => Payload::IntPair {
            first: rng.random_range(1..130),
            second: rng.random_range(1..65),
            anomalous: rng.random(),
        },
        PayloadKind::Timing => {
            if rng.random_ratio(1, 5) {
                Payload::Timing(TimingOutcome::Unsupported)
            } else {
                Payload::Timing(TimingOutcome::Measured(TimingStats {
                    iterations: rng.random_range(100_000..1_000_000),
                    software_median_ns: rng.random::<f64>() * 1e7,
                    software_iqr_ns: rng.random::<f64>() * 1e5,
                    hardware_median_ns: rng.random::<f64>() * 1e6,
                    hardware_iqr_ns: rng.random::<f64>() * 1e4,
                    ratio: rng.random::<f64>() * 50.0,
                    checksum: rng.random(),
                    hardware_method: "popcnt".into(),
                }))
            }
        }
        PayloadKind::Error => Payload::Error("unreachable".into()),
    }
}

/// A structurally valid fingerprint with random payloads.
pub fn random_fingerprint(rng: &mut impl Rng) -> Fingerprint {
    let backend = BACKENDS[rng.random_range(0..BACKENDS.len())];
    let width = match backend {
        "native-binary32" | "binary32" => 32,
        "sig64exp15-ne" => 79,
        "sig11exp5-tz-fma" => 16,
        _ => 64,
    };
    let mut results = Vec::new();
    for id in ProbeId::registry() {
        if !id.is_deterministic() && rng.random_ratio(1, 2) {
            continue;
        }
        results.push(ProbeResult::new(
            id.to_string(),
            backend,
            payload(rng, id.kind(), width),
        ));
    }
    let fp = Fingerprint::from_parts(backend, results).unwrap();
    if rng.random() {
        fp.with_created(rng.random_range(0..4_000_000_000))
    } else {
        fp
    }
}
