//! Emulated values and the single rounding routine every operation uses.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::config::{FpConfig, Rounding};
use crate::fpcore::bits::{BitPattern, EncodingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FpClass {
    Zero,
    Subnormal,
    Normal,
    Inf,
    Nan,
}

/// A value in some [`FpConfig`]. Finite values are
/// `(-1)^negative * significand * 2^exponent`; a normal significand has
/// exactly `significand_bits` bits. For NaN, `significand` holds the
/// trailing-significand payload (quiet bit included).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EmuValue {
    pub negative: bool,
    pub significand: u64,
    pub exponent: i32,
    pub class: FpClass,
}

impl EmuValue {
    pub fn zero(negative: bool) -> Self {
        Self {
            negative,
            significand: 0,
            exponent: 0,
            class: FpClass::Zero,
        }
    }

    pub fn inf(negative: bool) -> Self {
        Self {
            negative,
            significand: 0,
            exponent: 0,
            class: FpClass::Inf,
        }
    }

    /// Default quiet NaN: positive sign, only the quiet bit set.
    pub fn default_nan(cfg: &FpConfig) -> Self {
        Self {
            negative: false,
            significand: 1u64 << (cfg.significand_bits() - 2),
            exponent: 0,
            class: FpClass::Nan,
        }
    }

    pub fn quieted(self, cfg: &FpConfig) -> Self {
        debug_assert_eq!(self.class, FpClass::Nan);
        Self {
            significand: self.significand | 1u64 << (cfg.significand_bits() - 2),
            ..self
        }
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn is_nan(&self) -> bool {
        self.class == FpClass::Nan
    }

    pub fn is_zero(&self) -> bool {
        self.class == FpClass::Zero
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self.class, FpClass::Inf | FpClass::Nan)
    }

    pub fn negated(self) -> Self {
        Self {
            negative: !self.negative,
            ..self
        }
    }

    pub fn abs(self) -> Self {
        Self {
            negative: false,
            ..self
        }
    }

    /// Exact `(magnitude, exponent)` of a finite nonzero value.
    pub(crate) fn exact(&self) -> (BigUint, i64) {
        (BigUint::from(self.significand), self.exponent as i64)
    }

    /// Correctly rounded conversion of a binary64 value. Uses only the
    /// bit fields of `x`, never host arithmetic.
    pub fn from_f64(x: f64, cfg: &FpConfig) -> Self {
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let trailing = bits & ((1u64 << 52) - 1);
        match (biased, trailing) {
            (0, 0) => Self::zero(negative),
            (0x7ff, 0) => Self::inf(negative),
            (0x7ff, payload) => {
                let p = cfg.significand_bits();
                // keep the top payload bits
                let shifted = if p > 52 {
                    payload << (p - 1 - 52)
                } else {
                    payload >> (52 - (p - 1))
                };
                Self {
                    negative,
                    significand: shifted,
                    exponent: 0,
                    class: FpClass::Nan,
                }
                .quieted(cfg)
            }
            (0, t) => round_exact(negative, &BigUint::from(t), -1074, false, cfg),
            (b, t) => round_exact(negative, &BigUint::from(t | 1u64 << 52), b - 1075, false, cfg),
        }
    }

    /// Nearest binary64 value (rounded to nearest-even), assembled from bits.
    pub fn to_f64(&self, cfg: &FpConfig) -> f64 {
        let v = match self.class {
            FpClass::Nan => {
                let p = cfg.significand_bits();
                let payload = if p > 52 {
                    self.significand >> (p - 1 - 52)
                } else {
                    self.significand << (52 - (p - 1))
                };
                let sign = (self.negative as u64) << 63;
                return f64::from_bits(sign | 0x7ffu64 << 52 | payload | 1u64 << 51);
            }
            FpClass::Zero | FpClass::Inf => *self,
            _ => {
                let (m, e) = self.exact();
                round_exact(self.negative, &m, e, false, &FpConfig::BINARY64)
            }
        };
        let bits = encode(&v, &FpConfig::BINARY64);
        f64::from_bits(bits as u64)
    }

    pub fn to_bits(&self, cfg: &FpConfig) -> BitPattern {
        BitPattern::from_raw(cfg.width(), encode(self, cfg)).expect("width fits")
    }

    pub fn from_bits(p: &BitPattern, cfg: &FpConfig) -> Result<Self, EncodingError> {
        if p.width() != cfg.width() {
            return Err(EncodingError::Width(p.width()));
        }
        let bits = p.bits();
        let sig_bits = cfg.significand_bits();
        let w = cfg.width();
        let negative = (bits >> (w - 1)) & 1 == 1;
        let biased = ((bits >> (sig_bits - 1)) & ((1u128 << cfg.exponent_bits()) - 1)) as i64;
        let trailing = (bits & ((1u128 << (sig_bits - 1)) - 1)) as u64;
        let all_ones = (1i64 << cfg.exponent_bits()) - 1;
        Ok(match (biased, trailing) {
            (0, 0) => Self::zero(negative),
            (0, t) => Self {
                negative,
                significand: t,
                exponent: cfg.qmin() as i32,
                class: FpClass::Subnormal,
            },
            (b, 0) if b == all_ones => Self::inf(negative),
            (b, t) if b == all_ones => Self {
                negative,
                significand: t,
                exponent: 0,
                class: FpClass::Nan,
            },
            (b, t) => Self {
                negative,
                significand: t | 1u64 << (sig_bits - 1),
                exponent: (b - cfg.bias() - (sig_bits as i64 - 1)) as i32,
                class: FpClass::Normal,
            },
        })
    }
}

fn encode(v: &EmuValue, cfg: &FpConfig) -> u128 {
    let sig_bits = cfg.significand_bits();
    let sign = (v.negative as u128) << (cfg.width() - 1);
    let all_ones = (1u128 << cfg.exponent_bits()) - 1;
    let field = |biased: u128, trailing: u64| sign | biased << (sig_bits - 1) | trailing as u128;
    match v.class {
        FpClass::Zero => sign,
        FpClass::Inf => field(all_ones, 0),
        FpClass::Nan => field(all_ones, v.significand & ((1u64 << (sig_bits - 1)) - 1)),
        FpClass::Subnormal => field(0, v.significand),
        FpClass::Normal => {
            let biased = v.exponent as i64 + sig_bits as i64 - 1 + cfg.bias();
            field(biased as u128, v.significand & !(1u64 << (sig_bits - 1)))
        }
    }
}

/// Rounds `(mag + d) * 2^exp` into `cfg`, where `d = 0` when `sticky` is
/// false and `0 < d < 1` otherwise. Handles subnormals and overflow.
pub(crate) fn round_exact(negative: bool, mag: &BigUint, exp: i64, sticky: bool, cfg: &FpConfig) -> EmuValue {
    let p = cfg.significand_bits() as i64;
    if mag.is_zero() {
        debug_assert!(!sticky, "inexact zero magnitude needs guard bits");
        return EmuValue::zero(negative);
    }
    let nbits = mag.bits() as i64;
    let top = nbits - 1 + exp;
    let mut lsb = (top - (p - 1)).max(cfg.qmin());
    let shift = lsb - exp;

    let (mut kept, half, rest) = if shift > 0 {
        let s = shift as u64;
        let kept = mag >> s;
        let half = mag.bit(s - 1);
        let below = s - 1;
        let rest = sticky || (below > 0 && mag.trailing_zeros().is_some_and(|tz| tz < below));
        (kept, half, rest)
    } else {
        (mag << (-shift) as u64, false, sticky)
    };

    let inexact = half || rest;
    let round_up = match cfg.rounding {
        Rounding::NearestEven => half && (rest || kept.bit(0)),
        Rounding::TowardZero => false,
        Rounding::TowardPositive => !negative && inexact,
        Rounding::TowardNegative => negative && inexact,
    };
    if round_up {
        kept += 1u32;
    }
    if kept.bits() as i64 > p {
        kept >>= 1u32;
        lsb += 1;
    }
    if kept.is_zero() {
        return EmuValue::zero(negative);
    }
    let top = kept.bits() as i64 - 1 + lsb;
    if top > cfg.emax() {
        return overflow(negative, cfg);
    }
    let class = if kept.bits() as i64 == p {
        FpClass::Normal
    } else {
        FpClass::Subnormal
    };
    EmuValue {
        negative,
        significand: kept.to_u64().expect("at most 64 significand bits"),
        exponent: lsb as i32,
        class,
    }
}

fn overflow(negative: bool, cfg: &FpConfig) -> EmuValue {
    let to_inf = match cfg.rounding {
        Rounding::NearestEven => true,
        Rounding::TowardZero => false,
        Rounding::TowardPositive => !negative,
        Rounding::TowardNegative => negative,
    };
    if to_inf {
        EmuValue::inf(negative)
    } else {
        max_finite(negative, cfg)
    }
}

pub fn max_finite(negative: bool, cfg: &FpConfig) -> EmuValue {
    let p = cfg.significand_bits();
    EmuValue {
        negative,
        significand: if p == 64 { u64::MAX } else { (1u64 << p) - 1 },
        exponent: (cfg.emax() - (p as i64 - 1)) as i32,
        class: FpClass::Normal,
    }
}

/// Correctly rounded `num / den * 2^exp2`.
pub(crate) fn round_ratio(negative: bool, num: &BigUint, den: &BigUint, exp2: i64, cfg: &FpConfig) -> EmuValue {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return EmuValue::zero(negative);
    }
    let p = cfg.significand_bits() as i64;
    let k = p + 3 + den.bits() as i64 - num.bits() as i64;
    let (q, r) = if k >= 0 {
        let n = num << k as u64;
        (&n / den, n % den)
    } else {
        let d = den << (-k) as u64;
        (num / &d, num % d)
    };
    round_exact(negative, &q, exp2 - k, !r.is_zero(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_f64_round_trips_binary64() {
        let cfg = FpConfig::BINARY64;
        for x in [
            1.0,
            -0.0,
            0.1,
            f64::MAX,
            f64::MIN_POSITIVE,
            5e-324,
            -2.5e-310,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ] {
            let v = EmuValue::from_f64(x, &cfg);
            assert_eq!(v.to_f64(&cfg).to_bits(), x.to_bits(), "{x:e}");
            assert_eq!(v.to_bits(&cfg), BitPattern::from_f64(x));
        }
    }

    #[test]
    fn subnormal_classification() {
        let cfg = FpConfig::BINARY64;
        let v = EmuValue::from_f64(5e-324, &cfg);
        assert_eq!(v.class, FpClass::Subnormal);
        assert_eq!((v.significand, v.exponent), (1, -1074));
        let n = EmuValue::from_f64(1.0, &cfg);
        assert_eq!(n.class, FpClass::Normal);
        assert_eq!(n.significand, 1 << 52);
    }

    #[test]
    fn narrowing_matches_host_cast() {
        let cfg = FpConfig::BINARY32;
        for x in [0.1f64, 1.0 / 3.0, 1e-40, 3.5e38, 1e39, -7.25, 1e-46, 7e-46] {
            let v = EmuValue::from_f64(x, &cfg);
            assert_eq!(v.to_bits(&cfg), BitPattern::from_f32(x as f32), "{x:e}");
        }
    }

    #[test]
    fn overflow_respects_rounding() {
        let big = 1e300;
        let tz = FpConfig::BINARY32.with_rounding(Rounding::TowardZero);
        assert_eq!(EmuValue::from_f64(big, &tz), max_finite(false, &tz));
        assert_eq!(EmuValue::from_f64(big, &FpConfig::BINARY32).class, FpClass::Inf);
        let dn = FpConfig::BINARY32.with_rounding(Rounding::TowardNegative);
        assert_eq!(EmuValue::from_f64(big, &dn), max_finite(false, &dn));
        assert_eq!(EmuValue::from_f64(-big, &dn).class, FpClass::Inf);
    }

    #[test]
    fn ratio_rounds_tenth() {
        let cfg = FpConfig::BINARY64;
        let v = round_ratio(false, &BigUint::from(1u32), &BigUint::from(10u32), 0, &cfg);
        assert_eq!(v.to_f64(&cfg), 0.1);
    }

    #[test]
    fn nan_bits() {
        let cfg = FpConfig::BINARY64;
        let n = EmuValue::default_nan(&cfg);
        assert_eq!(n.to_bits(&cfg).hex(), "7ff8000000000000");
        let back = EmuValue::from_bits(&n.to_bits(&cfg), &cfg).unwrap();
        assert_eq!(back, n);
        let payload = f64::from_bits(0x7ff8_0000_0000_1234);
        assert_eq!(
            EmuValue::from_f64(payload, &cfg).to_f64(&cfg).to_bits(),
            0x7ff8_0000_0000_1234
        );
    }
}
