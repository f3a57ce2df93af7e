//! Emulated sine with three selectable argument-reduction strategies.
//!
//! The high-precision path works in signed fixed point: an integer `X`
//! stands for `X / 2^w`. π comes from Machin's formula at whatever
//! precision the argument needs, so reduction stays exact-enough for any
//! representable input. Results are rounded once, with a Ziv-style retry
//! when the error interval straddles a rounding boundary.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::config::{FpConfig, SinStrategy};
use super::ops::{emu_add, emu_cmp, emu_div, emu_eq, emu_fmod, emu_from_i64, emu_mul, emu_sub};
use super::value::{round_exact, EmuValue, FpClass};

/// `floor(atan(1/n) * 2^w)` within a few units.
fn atan_inv(n: u32, w: u64) -> BigInt {
    let n2 = BigInt::from(n) * BigInt::from(n);
    let mut power = (BigInt::one() << w) / BigInt::from(n);
    let mut sum = power.clone();
    let mut k = 1u64;
    loop {
        power /= &n2;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

/// π scaled by `2^w`, with absolute error below 2 units.
pub fn pi_fixed(w: u64) -> BigInt {
    const GUARD: u64 = 32;
    let wg = w + GUARD;
    let pi = BigInt::from(16) * atan_inv(5, wg) - BigInt::from(4) * atan_inv(239, wg);
    pi >> GUARD
}

/// `round(a / b)` for positive `b`, ties away from zero.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if BigInt::from(2) * r >= *b {
        q + 1
    } else {
        q
    }
}

/// Fixed-point sine or cosine of `r` (scale `2^w`) for `|r| <= ~pi/4`,
/// returning the value and an error bound in units.
fn kernel(r: &BigInt, w: u64, cosine: bool) -> (BigInt, u64) {
    let one = BigInt::one() << w;
    let r2 = (r * r) >> w;
    let (mut term, mut sum, mut k) = if cosine {
        (one.clone(), one, 0u64)
    } else {
        (r.clone(), r.clone(), 1u64)
    };
    let mut steps = 0u64;
    loop {
        term = -((&term * &r2) >> w) / BigInt::from((k + 1) * (k + 2));
        k += 2;
        steps += 1;
        if term.is_zero() {
            break;
        }
        sum += &term;
    }
    (sum, 3 * steps + 4)
}

/// Fixed-point `sin(x)` for an exact binary value `x = m * 2^e` (sign
/// `neg`), returning `(value, error bound in units)` at scale `2^w`.
fn sin_fixed(neg: bool, m: &BigUint, e: i64, w: u64) -> (BigInt, u64) {
    debug_assert!(e + w as i64 >= 0);
    let x = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, m << (e + w as i64) as u64);
    // pi/2 at scale 2^w with error below 1.5 units
    let pi = pi_fixed(w + 1);
    let half_pi = &pi >> 2u32;
    let n = div_round(&x, &half_pi);
    let r = &x - &n * &half_pi;
    let reduction_err = n.magnitude().clone() * 2u32 + 2u32;
    let quadrant = n.mod_floor(&BigInt::from(4)).iter_u64_digits().next().unwrap_or(0);
    let (v, kerr) = match quadrant {
        0 => kernel(&r, w, false),
        1 => kernel(&r, w, true),
        2 => {
            let (v, e) = kernel(&r, w, false);
            (-v, e)
        }
        _ => {
            let (v, e) = kernel(&r, w, true);
            (-v, e)
        }
    };
    let err = u64::try_from(reduction_err).unwrap_or(u64::MAX).saturating_add(kerr);
    (v, err)
}

/// Correctly rounded sine of an exact finite nonzero value.
fn sin_correct(v: EmuValue, cfg: &FpConfig) -> EmuValue {
    let (m, e) = v.exact();
    let p = cfg.significand_bits() as u64;
    let top = e + m.bits() as i64 - 1;
    let mut guard = 64u64;
    let mut last = None;
    for _ in 0..10 {
        let w = top.max(0) as u64 + (-e).max(0) as u64 + p + guard;
        let (s, err) = sin_fixed(v.negative, &m, e, w);
        let err = BigInt::from(err);
        let lo = &s - &err;
        let hi = &s + &err;
        let round = |x: &BigInt| {
            if x.is_zero() {
                EmuValue::zero(false)
            } else {
                round_exact(x.is_negative(), x.magnitude(), -(w as i64), false, cfg)
            }
        };
        let (rl, rh) = (round(&lo), round(&hi));
        if lo.sign() == hi.sign() && lo.sign() != Sign::NoSign && rl == rh {
            return rl;
        }
        last = Some(round(&s));
        guard *= 2;
    }
    last.expect("loop ran")
}

/// 2π (or π when `half`) rounded into the working format.
fn pi_in(cfg: &FpConfig, half: bool) -> EmuValue {
    let w = cfg.significand_bits() as u64 + 96;
    let pi = pi_fixed(w);
    let scaled = if half { pi } else { pi << 1u32 };
    // π is irrational: the truncated bits are never all zero
    round_exact(false, scaled.magnitude(), -(w as i64), true, cfg)
}

fn naive_reduce(a: EmuValue, cfg: &FpConfig) -> EmuValue {
    emu_fmod(a, pi_in(cfg, false), cfg)
}

fn taylor_in_cfg(r: EmuValue, cfg: &FpConfig) -> EmuValue {
    let r2 = emu_mul(r, r, cfg);
    let mut term = r;
    let mut sum = r;
    for k in 1..=60i64 {
        let denom = emu_from_i64((2 * k) * (2 * k + 1), cfg);
        term = emu_div(emu_mul(term, r2, cfg), denom, cfg).negated();
        let next = emu_add(sum, term, cfg);
        if emu_eq(next, sum) {
            break;
        }
        sum = next;
    }
    sum
}

/// Sine under `cfg.sin_strategy`. Infinite or NaN input gives NaN; signed
/// zeros pass through.
pub fn emu_sin(a: EmuValue, cfg: &FpConfig) -> EmuValue {
    match a.class {
        FpClass::Nan => return a.quieted(cfg),
        FpClass::Inf => return EmuValue::default_nan(cfg),
        FpClass::Zero => return a,
        _ => {}
    }
    match cfg.sin_strategy {
        SinStrategy::PayneHanek => sin_correct(a, cfg),
        SinStrategy::NaiveMod2Pi => {
            let r = naive_reduce(a, cfg);
            if r.is_zero() {
                r
            } else {
                sin_correct(r, cfg)
            }
        }
        SinStrategy::TaylorAfterNaiveReduction => {
            let two_pi = pi_in(cfg, false);
            let pi = pi_in(cfg, true);
            let mut r = naive_reduce(a, cfg);
            if emu_cmp(r, pi) == Some(Ordering::Greater) {
                r = emu_sub(r, two_pi, cfg);
            } else if emu_cmp(r, pi.negated()) == Some(Ordering::Less) {
                r = emu_add(r, two_pi, cfg);
            }
            if r.is_zero() {
                r
            } else {
                taylor_in_cfg(r, cfg)
            }
        }
    }
}
