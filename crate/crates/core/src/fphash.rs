//! Experimental environment-sensitive hash.
//!
//! The state is one floating-point number driven through the logistic map
//! in the chosen backend's arithmetic. Each message byte is mixed in as
//! `x = ((b + 1) / 257 + x) / 2`, followed by `rounds_per_byte` logistic
//! steps; then the bit pattern of `x` (folded to 64 bits) is XORed into
//! word 0 of a 256-bit accumulator that is first rotated left by 17 bits.
//! Finalization repeats four times: 16 steps, then absorb.
//!
//! Constants (257, 17, 16) are arbitrary but fixed. This is a research
//! prototype for measuring arithmetic sensitivity. It is not a secure hash
//! and no collision or preimage resistance is claimed.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::emul::Emulator;
use crate::fpcore::arith::{Arith, Native32, Native64};
use crate::probes::numeric::logistic_step;
use crate::probes::Backend;

pub const DEFAULT_R: f64 = 3.999;
pub const DEFAULT_ROUNDS_PER_BYTE: u32 = 16;
pub const DEFAULT_DIGEST_BITS: u32 = 256;
pub const ROTATION: u32 = 17;
pub const FINAL_ROUNDS: u32 = 4;
pub const FINAL_STEPS: u32 = 16;
pub const MIN_TRIALS: usize = 100;
pub const DIVERGENCE_SEED: u64 = 0x6670_6861_7368;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HashError {
    #[error("domain error: r must satisfy 3.57 < r <= 4, got {0}")]
    R(f64),
    #[error("domain error: rounds_per_byte must be >= 8, got {0}")]
    Rounds(u32),
    #[error("domain error: digest_bits must be a positive multiple of 64, got {0}")]
    DigestBits(u32),
    #[error("domain error: at least {MIN_TRIALS} trials required, got {0}")]
    Trials(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpHashParams {
    pub r: f64,
    pub rounds_per_byte: u32,
    pub digest_bits: u32,
    pub backend: Backend,
}

impl FpHashParams {
    pub fn new(backend: Backend) -> Self {
        Self {
            r: DEFAULT_R,
            rounds_per_byte: DEFAULT_ROUNDS_PER_BYTE,
            digest_bits: DEFAULT_DIGEST_BITS,
            backend,
        }
    }

    pub fn validate(&self) -> Result<(), HashError> {
        if !(self.r > 3.57 && self.r <= 4.0) {
            return Err(HashError::R(self.r));
        }
        if self.rounds_per_byte < 8 {
            return Err(HashError::Rounds(self.rounds_per_byte));
        }
        if self.digest_bits == 0 || !self.digest_bits.is_multiple_of(64) {
            return Err(HashError::DigestBits(self.digest_bits));
        }
        Ok(())
    }
}

impl Default for FpHashParams {
    fn default() -> Self {
        Self::new(Backend::Native64)
    }
}

/// Digest words, most significant first in the hex rendering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpDigest(pub Vec<u64>);

impl FpDigest {
    pub fn bits(&self) -> u32 {
        self.0.len() as u32 * 64
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|w| format!("{w:016x}")).collect()
    }

    pub fn hamming(&self, other: &Self) -> u32 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a ^ b).count_ones()).sum()
    }
}

impl fmt::Display for FpDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

fn rotate_left(words: &mut [u64], n: u32) {
    let total = words.len() as u32 * 64;
    let n = n % total;
    if n == 0 {
        return;
    }
    let src = words.to_vec();
    let len = words.len();
    let bit = |i: u32| (src[len - 1 - (i / 64) as usize] >> (i % 64)) & 1;
    for w in words.iter_mut() {
        *w = 0;
    }
    for i in 0..total {
        let j = (i + n) % total;
        words[len - 1 - (j / 64) as usize] |= bit(i) << (j % 64);
    }
}

fn hash_with<A: Arith>(arith: &A, msg: &[u8], p: &FpHashParams) -> FpDigest {
    let words = (p.digest_bits / 64) as usize;
    let mut acc = vec![0u64; words];
    let r = arith.from_f64(p.r);
    let one = arith.from_i64(1);
    let two = arith.from_i64(2);
    let d257 = arith.from_i64(257);
    let mut x = arith.from_f64(0.5);
    let absorb = |acc: &mut Vec<u64>, x: A::Value| {
        rotate_left(acc, ROTATION);
        // word 0 is the least significant word
        let last = acc.len() - 1;
        acc[last] ^= arith.bits(x).fold64();
    };
    for &b in msg {
        let inj = arith.div(arith.from_i64(b as i64 + 1), d257);
        x = arith.div(arith.add(inj, x), two);
        for _ in 0..p.rounds_per_byte {
            x = logistic_step(arith, r, one, x);
        }
        absorb(&mut acc, x);
    }
    for _ in 0..FINAL_ROUNDS {
        for _ in 0..FINAL_STEPS {
            x = logistic_step(arith, r, one, x);
        }
        absorb(&mut acc, x);
    }
    FpDigest(acc)
}

/// Hashes `msg` in the arithmetic of `params.backend`.
pub fn fp_hash(msg: &[u8], params: &FpHashParams) -> Result<FpDigest, HashError> {
    params.validate()?;
    Ok(match params.backend {
        Backend::Native64 => hash_with(&Native64, msg, params),
        Backend::Native32 => hash_with(&Native32, msg, params),
        Backend::Emulated(cfg) => hash_with(&Emulator::new(cfg), msg, params),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub trials: usize,
    pub differing: usize,
    /// `differing / trials`
    pub fraction: f64,
    pub mean_hamming: f64,
    pub min_hamming: u32,
    pub max_hamming: u32,
}

impl fmt::Display for DivergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trials={} differing={} fraction={:.4} hamming mean={:.2} min={} max={}",
            self.trials, self.differing, self.fraction, self.mean_hamming, self.min_hamming, self.max_hamming
        )
    }
}

fn summarize(distances: &[u32]) -> DivergenceReport {
    let differing = distances.iter().filter(|&&d| d > 0).count();
    let n = distances.len();
    DivergenceReport {
        trials: n,
        differing,
        fraction: differing as f64 / n as f64,
        mean_hamming: distances.iter().map(|&d| d as f64).sum::<f64>() / n as f64,
        min_hamming: distances.iter().copied().min().unwrap_or(0),
        max_hamming: distances.iter().copied().max().unwrap_or(0),
    }
}

fn random_message(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    let mut m = vec![0u8; len];
    rng.fill_bytes(&mut m);
    m
}

/// Hashes `trials` seeded random 64-byte messages under both parameter
/// sets and compares the digests.
pub fn measure_divergence(a: &FpHashParams, b: &FpHashParams, trials: usize) -> Result<DivergenceReport, HashError> {
    if trials < MIN_TRIALS {
        return Err(HashError::Trials(trials));
    }
    a.validate()?;
    b.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(DIVERGENCE_SEED);
    let mut d = Vec::with_capacity(trials);
    for _ in 0..trials {
        let m = random_message(&mut rng, 64);
        d.push(fp_hash(&m, a)?.hamming(&fp_hash(&m, b)?));
    }
    Ok(summarize(&d))
}

/// Flips one random bit of a random 64-byte message per trial and reports
/// the digest Hamming distances under a single parameter set.
pub fn measure_avalanche(params: &FpHashParams, trials: usize) -> Result<DivergenceReport, HashError> {
    if trials < MIN_TRIALS {
        return Err(HashError::Trials(trials));
    }
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(DIVERGENCE_SEED ^ 1);
    let mut d = Vec::with_capacity(trials);
    for _ in 0..trials {
        let m = random_message(&mut rng, 64);
        let bit = (rng.next_u32() % 512) as usize;
        let mut flipped = m.clone();
        flipped[bit / 8] ^= 1 << (bit % 8);
        d.push(fp_hash(&m, params)?.hamming(&fp_hash(&flipped, params)?));
    }
    Ok(summarize(&d))
}
