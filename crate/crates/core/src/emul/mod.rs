//! Parametric software floating point.
//!
//! Any binary format with 8..=64 significand bits and 5..=15 exponent bits,
//! four rounding directions, optional fused multiply-add, and three sine
//! strategies. Used as the verification oracle for the native battery and
//! to synthesize fingerprints of arithmetic we cannot run natively.

pub mod config;
pub mod ops;
pub mod sin;
pub mod value;

use num_bigint::BigUint;

pub use config::{ConfigError, FpConfig, Rounding, SinStrategy};
pub use ops::{
    emu_add, emu_cmp, emu_div, emu_eq, emu_fma, emu_fmod, emu_from_i64, emu_mul, emu_neg, emu_sqrt, emu_sub,
};
pub use sin::emu_sin;
pub use value::{max_finite, EmuValue, FpClass};

use crate::fpcore::arith::{Arith, LiteralError};
use crate::fpcore::bits::BitPattern;
use crate::fpcore::exact::parse_decimal;
use crate::probes::{self, ProbeError, ProbeResult};

/// [`Arith`] backend running entirely in emulated arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emulator {
    pub cfg: FpConfig,
}

impl Emulator {
    pub fn new(cfg: FpConfig) -> Self {
        Self { cfg }
    }
}

impl Arith for Emulator {
    type Value = EmuValue;

    fn label(&self) -> String {
        self.cfg.name()
    }
    fn format(&self) -> (u32, u32) {
        (self.cfg.exponent_bits(), self.cfg.significand_bits())
    }
    fn literal(&self, decimal: &str) -> Result<EmuValue, LiteralError> {
        let q = parse_decimal(decimal).ok_or_else(|| LiteralError(decimal.into()))?;
        let negative = q.numer().sign() == num_bigint::Sign::Minus;
        let v = value::round_ratio(negative, q.numer().magnitude(), q.denom().magnitude(), 0, &self.cfg);
        // keep "-0" distinct from "0"
        Ok(if v.is_zero() {
            EmuValue::zero(decimal.starts_with('-'))
        } else {
            v
        })
    }
    fn from_i64(&self, n: i64) -> EmuValue {
        emu_from_i64(n, &self.cfg)
    }
    fn from_f64(&self, x: f64) -> EmuValue {
        EmuValue::from_f64(x, &self.cfg)
    }
    fn pow10(&self, k: u32) -> EmuValue {
        let n = num_traits::pow(BigUint::from(10u32), k as usize);
        value::round_ratio(false, &n, &BigUint::from(1u32), 0, &self.cfg)
    }
    fn add(&self, a: EmuValue, b: EmuValue) -> EmuValue {
        emu_add(a, b, &self.cfg)
    }
    fn sub(&self, a: EmuValue, b: EmuValue) -> EmuValue {
        emu_sub(a, b, &self.cfg)
    }
    fn mul(&self, a: EmuValue, b: EmuValue) -> EmuValue {
        emu_mul(a, b, &self.cfg)
    }
    fn div(&self, a: EmuValue, b: EmuValue) -> EmuValue {
        emu_div(a, b, &self.cfg)
    }
    fn sqrt(&self, a: EmuValue) -> EmuValue {
        emu_sqrt(a, &self.cfg)
    }
    fn sin(&self, a: EmuValue) -> EmuValue {
        emu_sin(a, &self.cfg)
    }
    fn neg(&self, a: EmuValue) -> EmuValue {
        emu_neg(a)
    }
    fn fma(&self, a: EmuValue, b: EmuValue, c: EmuValue) -> EmuValue {
        emu_fma(a, b, c, &self.cfg)
    }
    fn contracts(&self) -> bool {
        self.cfg.fma_enabled
    }
    fn eq(&self, a: EmuValue, b: EmuValue) -> bool {
        emu_eq(a, b)
    }
    fn is_nan(&self, a: EmuValue) -> bool {
        a.is_nan()
    }
    fn bits(&self, a: EmuValue) -> BitPattern {
        a.to_bits(&self.cfg)
    }
    fn to_f64(&self, a: EmuValue) -> f64 {
        a.to_f64(&self.cfg)
    }
}

/// Runs one registered probe entirely under the emulator.
pub fn run_probe_under(probe_id: &str, cfg: FpConfig) -> Result<ProbeResult, ProbeError> {
    probes::run_probe(probe_id, &probes::Backend::Emulated(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_like_the_host_parser() {
        let e = Emulator::new(FpConfig::BINARY64);
        for lit in [
            "0.1",
            "1.2",
            "0.8",
            "3.999",
            "3.1415926535897932385",
            "-0.0",
            "1e-320",
            "1e400",
        ] {
            let host: f64 = lit.parse().unwrap();
            assert_eq!(
                e.literal(lit).unwrap().to_f64(&e.cfg).to_bits(),
                host.to_bits(),
                "{lit}"
            );
        }
        let e32 = Emulator::new(FpConfig::BINARY32);
        for lit in ["0.1", "192119201", "3.141592653", "1e-45"] {
            let host: f32 = lit.parse().unwrap();
            assert_eq!(e32.bits(e32.literal(lit).unwrap()), BitPattern::from_f32(host), "{lit}");
        }
    }

    #[test]
    fn pow10_matches_literal() {
        let e = Emulator::new(FpConfig::BINARY64);
        for k in [0, 1, 10, 17, 22, 23, 37, 100, 308] {
            let host: f64 = format!("1e{k}").parse().unwrap();
            assert_eq!(e.to_f64(e.pow10(k)), host, "1e{k}");
        }
    }
}
