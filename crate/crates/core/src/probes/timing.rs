//! Popcount timing: software shift-mask loop against the best popcount the
//! platform offers. Best effort; never part of canonical fingerprints.

use std::hint::black_box;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::result::{TimingOutcome, TimingStats};
use super::ProbeError;

pub const POPCOUNT_SEED: u64 = 0x5052_4f43_5343_4f50;
pub const MIN_ITERATIONS: u64 = 100_000;
pub const DEFAULT_SAMPLES: usize = 9;

pub fn popcount_software(x: u64) -> u32 {
    let mut v = x;
    let mut count = 0;
    while v != 0 {
        count += (v & 1) as u32;
        v >>= 1;
    }
    count
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn sum_popcnt(words: &[u64]) -> u64 {
    words.iter().map(|w| w.count_ones() as u64).sum()
}

fn sum_count_ones(words: &[u64]) -> u64 {
    words.iter().map(|w| w.count_ones() as u64).sum()
}

/// Sum of popcounts using the fastest available method, and its name.
pub fn popcount_hardware_sum(words: &[u64]) -> (u64, &'static str) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("popcnt") {
            // SAFETY: the popcnt feature was detected at runtime
            return (unsafe { sum_popcnt(words) }, "popcnt");
        }
    }
    (sum_count_ones(words), "count_ones")
}

pub fn popcount_software_sum(words: &[u64]) -> u64 {
    words.iter().map(|&w| popcount_software(black_box(w)) as u64).sum()
}

/// Fixed pseudorandom input sequence.
pub fn popcount_input(iterations: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(POPCOUNT_SEED);
    (0..iterations).map(|_| rng.next_u64()).collect()
}

/// Median and interquartile range (nearest-rank quartiles).
pub fn median_iqr(samples: &mut [f64]) -> (f64, f64) {
    assert!(!samples.is_empty());
    samples.sort_by(f64::total_cmp);
    let at = |q: f64| samples[((samples.len() - 1) as f64 * q).round() as usize];
    (at(0.5), at(0.75) - at(0.25))
}

pub fn probe_popcount_timing(iterations: u64, samples: usize) -> Result<TimingOutcome, ProbeError> {
    if iterations < MIN_ITERATIONS {
        return Err(ProbeError::Domain(format!(
            "popcount timing needs at least {MIN_ITERATIONS} iterations, got {iterations}"
        )));
    }
    let words = popcount_input(iterations);
    let mut soft = Vec::with_capacity(samples);
    let mut hard = Vec::with_capacity(samples);
    let mut checksum = None;
    let mut method = "";
    for _ in 0..samples.max(1) {
        let t0 = Instant::now();
        let s = popcount_software_sum(black_box(&words));
        soft.push(t0.elapsed().as_nanos() as f64);
        let t1 = Instant::now();
        let (h, m) = popcount_hardware_sum(black_box(&words));
        hard.push(t1.elapsed().as_nanos() as f64);
        method = m;
        if s != h || checksum.is_some_and(|c| c != s) {
            return Err(ProbeError::Domain("popcount methods disagree".into()));
        }
        checksum = Some(s);
    }
    let (sm, si) = median_iqr(&mut soft);
    let (hm, hi) = median_iqr(&mut hard);
    Ok(TimingOutcome::Measured(TimingStats {
        iterations,
        software_median_ns: sm,
        software_iqr_ns: si,
        hardware_median_ns: hm,
        hardware_iqr_ns: hi,
        ratio: if hm > 0.0 { sm / hm } else { f64::INFINITY },
        checksum: checksum.unwrap_or(0),
        hardware_method: method.into(),
    }))
}
