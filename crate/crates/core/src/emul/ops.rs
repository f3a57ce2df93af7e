//! Correctly rounded arithmetic on [`EmuValue`]s.
//!
//! Every operation forms the exact result with big-integer arithmetic on
//! significands and rounds it once through [`round_exact`]. No host
//! floating-point instruction participates.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::config::{FpConfig, Rounding};
use super::value::{round_exact, round_ratio, EmuValue, FpClass};

fn pick_nan(a: &EmuValue, b: &EmuValue, cfg: &FpConfig) -> Option<EmuValue> {
    if a.is_nan() {
        Some(a.quieted(cfg))
    } else if b.is_nan() {
        Some(b.quieted(cfg))
    } else {
        None
    }
}

/// Sign of an exact zero sum of opposite-signed operands.
fn exact_zero_sign(cfg: &FpConfig) -> bool {
    cfg.rounding == Rounding::TowardNegative
}

/// Signed exact sum of two finite nonzero terms `(neg, mag, exp)`.
fn add_exact(a: (bool, BigUint, i64), b: (bool, BigUint, i64), cfg: &FpConfig) -> EmuValue {
    let (an, am, ae) = a;
    let (bn, bm, be) = b;
    // Put the larger exponent first.
    let ((an, am, ae), (bn, bm, be)) = if ae >= be {
        ((an, am, ae), (bn, bm, be))
    } else {
        ((bn, bm, be), (an, am, ae))
    };
    let guard = cfg.significand_bits() as i64 + 3;
    // b lies entirely below the guard bits of a: it only decides direction.
    if be + bm.bits() as i64 <= ae - guard {
        let m = am << guard as u64;
        let e = ae - guard;
        return if an == bn {
            round_exact(an, &m, e, true, cfg)
        } else {
            round_exact(an, &(m - 1u32), e, true, cfg)
        };
    }
    let e = be;
    let ma = BigInt::from_biguint(if an { Sign::Minus } else { Sign::Plus }, am << (ae - e) as u64);
    let mb = BigInt::from_biguint(if bn { Sign::Minus } else { Sign::Plus }, bm);
    let sum = ma + mb;
    if sum.is_zero() {
        return EmuValue::zero(exact_zero_sign(cfg));
    }
    round_exact(sum.is_negative(), sum.magnitude(), e, false, cfg)
}

pub fn emu_add(a: EmuValue, b: EmuValue, cfg: &FpConfig) -> EmuValue {
    if let Some(n) = pick_nan(&a, &b, cfg) {
        return n;
    }
    match (a.class, b.class) {
        (FpClass::Inf, FpClass::Inf) if a.negative != b.negative => EmuValue::default_nan(cfg),
        (FpClass::Inf, _) => a,
        (_, FpClass::Inf) => b,
        (FpClass::Zero, FpClass::Zero) => {
            if a.negative == b.negative {
                a
            } else {
                EmuValue::zero(exact_zero_sign(cfg))
            }
        }
        (FpClass::Zero, _) => b,
        (_, FpClass::Zero) => a,
        _ => {
            let (am, ae) = a.exact();
            let (bm, be) = b.exact();
            add_exact((a.negative, am, ae), (b.negative, bm, be), cfg)
        }
    }
}

pub fn emu_sub(a: EmuValue, b: EmuValue, cfg: &FpConfig) -> EmuValue {
    if let Some(n) = pick_nan(&a, &b, cfg) {
        return n;
    }
    emu_add(a, b.negated(), cfg)
}

pub fn emu_mul(a: EmuValue, b: EmuValue, cfg: &FpConfig) -> EmuValue {
    if let Some(n) = pick_nan(&a, &b, cfg) {
        return n;
    }
    let negative = a.negative != b.negative;
    match (a.class, b.class) {
        (FpClass::Inf, FpClass::Zero) | (FpClass::Zero, FpClass::Inf) => EmuValue::default_nan(cfg),
        (FpClass::Inf, _) | (_, FpClass::Inf) => EmuValue::inf(negative),
        (FpClass::Zero, _) | (_, FpClass::Zero) => EmuValue::zero(negative),
        _ => {
            let (am, ae) = a.exact();
            let (bm, be) = b.exact();
            round_exact(negative, &(am * bm), ae + be, false, cfg)
        }
    }
}

pub fn emu_div(a: EmuValue, b: EmuValue, cfg: &FpConfig) -> EmuValue {
    if let Some(n) = pick_nan(&a, &b, cfg) {
        return n;
    }
    let negative = a.negative != b.negative;
    match (a.class, b.class) {
        (FpClass::Inf, FpClass::Inf) | (FpClass::Zero, FpClass::Zero) => EmuValue::default_nan(cfg),
        (FpClass::Inf, _) | (_, FpClass::Zero) => EmuValue::inf(negative),
        (FpClass::Zero, _) | (_, FpClass::Inf) => EmuValue::zero(negative),
        _ => {
            let (am, ae) = a.exact();
            let (bm, be) = b.exact();
            round_ratio(negative, &am, &bm, ae - be, cfg)
        }
    }
}

/// Correctly rounded square root; negative nonzero input gives the default NaN.
pub fn emu_sqrt(a: EmuValue, cfg: &FpConfig) -> EmuValue {
    match a.class {
        FpClass::Nan => a.quieted(cfg),
        FpClass::Zero => a,
        _ if a.negative => EmuValue::default_nan(cfg),
        FpClass::Inf => a,
        _ => {
            let (mut m, mut e) = a.exact();
            if e.rem_euclid(2) == 1 {
                m <<= 1u32;
                e -= 1;
            }
            let p = cfg.significand_bits() as i64;
            let k = ((2 * p + 4 - m.bits() as i64).max(0) + 1) / 2;
            let scaled = m << (2 * k) as u64;
            let root = scaled.sqrt();
            let sticky = &root * &root != scaled;
            round_exact(false, &root, e / 2 - k, sticky, cfg)
        }
    }
}

/// `a * b + c` rounded once.
pub fn emu_fma(a: EmuValue, b: EmuValue, c: EmuValue, cfg: &FpConfig) -> EmuValue {
    if let Some(n) = pick_nan(&a, &b, cfg) {
        return n;
    }
    if c.is_nan() {
        return c.quieted(cfg);
    }
    let pneg = a.negative != b.negative;
    match (a.class, b.class) {
        (FpClass::Inf, FpClass::Zero) | (FpClass::Zero, FpClass::Inf) => EmuValue::default_nan(cfg),
        (FpClass::Inf, _) | (_, FpClass::Inf) => emu_add(EmuValue::inf(pneg), c, cfg),
        (FpClass::Zero, _) | (_, FpClass::Zero) => emu_add(EmuValue::zero(pneg), c, cfg),
        _ => {
            let (am, ae) = a.exact();
            let (bm, be) = b.exact();
            let prod = (pneg, am * bm, ae + be);
            match c.class {
                FpClass::Inf => c,
                FpClass::Zero => round_exact(prod.0, &prod.1, prod.2, false, cfg),
                _ => {
                    let (cm, ce) = c.exact();
                    add_exact(prod, (c.negative, cm, ce), cfg)
                }
            }
        }
    }
}

/// Exact remainder `a - trunc(a / b) * b` (C `fmod`); always representable.
pub fn emu_fmod(a: EmuValue, b: EmuValue, cfg: &FpConfig) -> EmuValue {
    if let Some(n) = pick_nan(&a, &b, cfg) {
        return n;
    }
    match (a.class, b.class) {
        (FpClass::Inf, _) | (_, FpClass::Zero) => EmuValue::default_nan(cfg),
        (FpClass::Zero, _) | (_, FpClass::Inf) => a,
        _ => {
            let (am, ae) = a.exact();
            let (bm, be) = b.exact();
            let e = ae.min(be);
            let ma = am << (ae - e) as u64;
            let mb = bm << (be - e) as u64;
            let r = ma.mod_floor(&mb);
            if r.is_zero() {
                EmuValue::zero(a.negative)
            } else {
                round_exact(a.negative, &r, e, false, cfg)
            }
        }
    }
}

pub fn emu_neg(a: EmuValue) -> EmuValue {
    a.negated()
}

/// IEEE equality.
pub fn emu_eq(a: EmuValue, b: EmuValue) -> bool {
    match (a.class, b.class) {
        (FpClass::Nan, _) | (_, FpClass::Nan) => false,
        (FpClass::Zero, FpClass::Zero) => true,
        _ => a == b,
    }
}

/// Numeric order; `None` when either side is NaN.
pub fn emu_cmp(a: EmuValue, b: EmuValue) -> Option<Ordering> {
    if a.is_nan() || b.is_nan() {
        return None;
    }
    if emu_eq(a, b) {
        return Some(Ordering::Equal);
    }
    let key = |v: &EmuValue| -> (i8, i8) {
        match v.class {
            FpClass::Inf if v.negative => (-2, 0),
            FpClass::Inf => (2, 0),
            FpClass::Zero => (0, 0),
            _ if v.negative => (-1, 0),
            _ => (1, 0),
        }
    };
    let (ka, kb) = (key(&a), key(&b));
    if ka != kb {
        return Some(ka.cmp(&kb));
    }
    // same sign, both finite nonzero
    let (am, ae) = a.exact();
    let (bm, be) = b.exact();
    let e = ae.min(be);
    let mag = (am << (ae - e) as u64).cmp(&(bm << (be - e) as u64));
    Some(if a.negative { mag.reverse() } else { mag })
}

/// Exact integer conversion, rounded once.
pub fn emu_from_i64(n: i64, cfg: &FpConfig) -> EmuValue {
    if n == 0 {
        return EmuValue::zero(false);
    }
    round_exact(n < 0, &BigUint::from(n.unsigned_abs()), 0, false, cfg)
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;

    fn e64(x: f64) -> EmuValue {
        EmuValue::from_f64(x, &FpConfig::BINARY64)
    }

    fn f(v: EmuValue) -> f64 {
        v.to_f64(&FpConfig::BINARY64)
    }

    const B64: FpConfig = FpConfig::BINARY64;

    #[test]
    fn tenth_plus_tenth_is_fifth() {
        assert!(emu_eq(emu_add(e64(0.1), e64(0.1), &B64), e64(0.2)));
    }

    #[test]
    fn one_point_two_minus_point_eight() {
        assert!(!emu_eq(emu_sub(e64(1.2), e64(0.8), &B64), e64(0.4)));
        assert_eq!(f(emu_sub(e64(1.2), e64(0.8), &B64)), 1.2 - 0.8);
    }

    #[test]
    fn powers_of_two_multiply_exactly() {
        for (k, m) in [(3, 4), (-20, 7), (500, 500), (-600, -400)] {
            let a = e64(2f64.powi(k));
            let b = e64(2f64.powi(m));
            assert_eq!(f(emu_mul(a, b, &B64)), 2f64.powi(k + m));
        }
    }

    #[test]
    fn sqrt_cases() {
        assert_eq!(f(emu_sqrt(e64(4.0), &B64)), 2.0);
        let cfg8 = FpConfig::new(8, 5, Rounding::TowardZero).unwrap();
        let four = emu_from_i64(4, &cfg8);
        assert_eq!(emu_sqrt(four, &cfg8), emu_from_i64(2, &cfg8));
        let zero = emu_sqrt(e64(0.0), &B64);
        assert!(zero.is_zero() && !zero.negative);
        assert!(emu_sqrt(e64(-0.0), &B64).negative);
        assert!(emu_sqrt(e64(-1.0), &B64).is_nan());
        let r2 = emu_sqrt(e64(2.0), &B64);
        assert_eq!(f(r2), 2f64.sqrt());
        assert!(!emu_eq(emu_mul(r2, r2, &B64), e64(2.0)));
    }

    #[test]
    fn special_values() {
        let inf = e64(f64::INFINITY);
        assert!(emu_add(inf, inf.negated(), &B64).is_nan());
        assert!(emu_mul(inf, e64(0.0), &B64).is_nan());
        assert_eq!(f(emu_div(e64(1.0), e64(-0.0), &B64)), f64::NEG_INFINITY);
        assert!(emu_div(e64(0.0), e64(0.0), &B64).is_nan());
        let z = emu_sub(e64(1.5), e64(1.5), &B64);
        assert!(z.is_zero() && !z.negative);
        let dn = B64.with_rounding(Rounding::TowardNegative);
        let z = emu_sub(e64(1.5), e64(1.5), &dn);
        assert!(z.is_zero() && z.negative);
        assert!(!emu_eq(EmuValue::default_nan(&B64), EmuValue::default_nan(&B64)));
        assert!(emu_eq(e64(0.0), e64(-0.0)));
    }

    #[test]
    fn far_apart_addends() {
        for (a, b) in [
            (1.0, 1e-300),
            (1.0, -1e-300),
            (1e300, 1.0),
            (-1e300, 3.0),
            (1.0, 2f64.powi(-54)),
        ] {
            assert_eq!(f(emu_add(e64(a), e64(b), &B64)), a + b, "{a:e} + {b:e}");
        }
        let up = B64.with_rounding(Rounding::TowardPositive);
        let r = emu_add(e64(1.0), e64(1e-300), &up);
        assert_eq!(f(r), 1.0 + f64::EPSILON);
        let tz = B64.with_rounding(Rounding::TowardZero);
        let r = emu_sub(e64(1.0), e64(1e-300), &tz);
        assert_eq!(f(r), 1.0 - f64::EPSILON / 2.0);
    }

    #[test]
    fn fma_single_rounding() {
        let a = e64(1.0 + f64::EPSILON);
        let b = e64(1.0 - f64::EPSILON);
        let c = e64(-1.0);
        let fused = f(emu_fma(a, b, c, &B64));
        assert_eq!(fused, (1.0 + f64::EPSILON).mul_add(1.0 - f64::EPSILON, -1.0));
        assert_ne!(fused, f(emu_add(emu_mul(a, b, &B64), c, &B64)));
    }

    #[test]
    fn fmod_is_exact() {
        let r = emu_fmod(e64(10.5), e64(3.0), &B64);
        assert_eq!(f(r), 1.5);
        let r = emu_fmod(e64(-10.5), e64(3.0), &B64);
        assert_eq!(f(r), -1.5);
        let x = 1e17 * 3.141592653;
        let y = 2.0 * std::f64::consts::PI;
        assert_eq!(f(emu_fmod(e64(x), e64(y), &B64)), x % y);
    }

    #[test]
    fn ordering() {
        assert_eq!(emu_cmp(e64(1.0), e64(2.0)), Some(Ordering::Less));
        assert_eq!(emu_cmp(e64(-1.0), e64(-2.0)), Some(Ordering::Greater));
        assert_eq!(emu_cmp(e64(-0.0), e64(0.0)), Some(Ordering::Equal));
        assert_eq!(emu_cmp(e64(f64::NEG_INFINITY), e64(-1e308)), Some(Ordering::Less));
        assert_eq!(emu_cmp(EmuValue::default_nan(&B64), e64(0.0)), None);
    }
}
