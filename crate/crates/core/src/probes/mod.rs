//! The probe battery.
//!
//! Every probe has a stable identifier and a fixed payload kind. The
//! battery runs them in canonical registry order on one backend; the
//! popcount timing probe always runs last.

pub mod numeric;
pub mod result;
pub mod timing;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use numeric::{
    probe_easy_computations, probe_gentleman, probe_logistic, probe_rump_f, probe_rump_p, probe_sin,
    probe_sqrt_identity, probe_sum_residual, rump_f_expr, rump_p_expr, GentlemanOutcome,
};
pub use result::{Payload, PayloadError, PayloadKind, ProbeResult, TimingOutcome, TimingStats};
pub use timing::probe_popcount_timing;

use crate::emul::{ConfigError, Emulator, FpConfig};
use crate::fpcore::arith::{Arith, Native32, Native64, NATIVE32_LABEL, NATIVE64_LABEL};
use crate::fpcore::consts::PiConstant;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbeError {
    #[error("unknown probe {0:?}")]
    UnknownProbe(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Arithmetic engine executing a probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Native64,
    Native32,
    Emulated(FpConfig),
}

impl Backend {
    pub fn label(&self) -> String {
        match self {
            Self::Native64 => NATIVE64_LABEL.into(),
            Self::Native32 => NATIVE32_LABEL.into(),
            Self::Emulated(cfg) => cfg.name(),
        }
    }

    /// `(exponent_bits, significand_bits)` of the working format.
    pub fn format(&self) -> (u32, u32) {
        match self {
            Self::Native64 => (11, 53),
            Self::Native32 => (8, 24),
            Self::Emulated(cfg) => (cfg.exponent_bits(), cfg.significand_bits()),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Backend {
    type Err = ConfigError;

    /// `native64`/`native-binary64`, `native32`/`native-binary32`, or any
    /// emulator configuration name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "native" | "native64" | NATIVE64_LABEL => Ok(Self::Native64),
            "native32" | NATIVE32_LABEL => Ok(Self::Native32),
            _ => s.parse().map(Self::Emulated),
        }
    }
}

/// Decoded probe identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeId {
    SqrtIdentity,
    Gentleman,
    EasyComputations,
    Sin { k: u32, pi: PiConstant },
    RumpF,
    RumpP,
    SumResidual(u32),
    LogisticDefault,
    PopcountTiming,
}

pub const SIN_EXPONENTS: [u32; 3] = [10, 17, 37];
pub const SUM_RESIDUAL_NS: [u32; 6] = [10, 21, 22, 25, 30, 100];
pub const SQRT_IDENTITY_INPUT: f64 = 2.0;

impl ProbeId {
    /// Every registered probe in canonical battery order.
    pub fn registry() -> Vec<ProbeId> {
        let mut ids = vec![Self::SqrtIdentity, Self::Gentleman, Self::EasyComputations];
        for k in SIN_EXPONENTS {
            for pi in PiConstant::ALL {
                ids.push(Self::Sin { k, pi });
            }
        }
        ids.push(Self::RumpF);
        ids.push(Self::RumpP);
        ids.extend(SUM_RESIDUAL_NS.map(Self::SumResidual));
        ids.push(Self::LogisticDefault);
        ids.push(Self::PopcountTiming);
        ids
    }

    pub fn kind(&self) -> PayloadKind {
        match self {
            Self::SqrtIdentity => PayloadKind::Bool,
            Self::Gentleman => PayloadKind::IntPair,
            Self::EasyComputations => PayloadKind::Bools,
            Self::Sin { .. } | Self::LogisticDefault => PayloadKind::Bits,
            Self::RumpF | Self::SumResidual(_) => PayloadKind::Residual,
            Self::RumpP => PayloadKind::ResidualPair,
            Self::PopcountTiming => PayloadKind::Timing,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        *self != Self::PopcountTiming
    }

    /// Position in the canonical order.
    pub fn rank(&self) -> usize {
        Self::registry().iter().position(|p| p == self).expect("registered id")
    }
}

impl fmt::Display for ProbeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SqrtIdentity => f.write_str("sqrt-identity"),
            Self::Gentleman => f.write_str("gentleman"),
            Self::EasyComputations => f.write_str("easy-computations"),
            Self::Sin { k, pi } => write!(f, "sin-k{k}-{pi}"),
            Self::RumpF => f.write_str("rump-f"),
            Self::RumpP => f.write_str("rump-p"),
            Self::SumResidual(n) => write!(f, "sum-residual-{n}"),
            Self::LogisticDefault => f.write_str("logistic-default"),
            Self::PopcountTiming => f.write_str("popcount-timing"),
        }
    }
}

impl FromStr for ProbeId {
    type Err = ProbeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::registry()
            .into_iter()
            .find(|p| p.to_string() == s)
            .ok_or_else(|| ProbeError::UnknownProbe(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatteryOptions {
    pub include_timing: bool,
    pub timing_iterations: u64,
    pub timing_samples: usize,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        Self {
            include_timing: true,
            timing_iterations: timing::MIN_ITERATIONS,
            timing_samples: timing::DEFAULT_SAMPLES,
        }
    }
}

impl BatteryOptions {
    pub fn deterministic_only() -> Self {
        Self {
            include_timing: false,
            ..Self::default()
        }
    }
}

fn run_on<A: Arith>(id: ProbeId, arith: &A, opts: &BatteryOptions) -> Result<Payload, ProbeError> {
    Ok(match id {
        ProbeId::SqrtIdentity => Payload::Bool(probe_sqrt_identity(arith, arith.from_f64(SQRT_IDENTITY_INPUT))?),
        ProbeId::Gentleman => {
            let g = probe_gentleman(arith);
            Payload::IntPair {
                first: g.mantissa_bits as i64,
                second: g.base as i64,
                anomalous: g.anomalous,
            }
        }
        ProbeId::EasyComputations => Payload::Bools(probe_easy_computations(arith).to_vec()),
        ProbeId::Sin { k, pi } => Payload::Bits(arith.bits(probe_sin(arith, k, pi))),
        ProbeId::RumpF => Payload::Residual(arith.bits(probe_rump_f(arith))),
        ProbeId::RumpP => {
            let (a, b) = probe_rump_p(arith);
            Payload::ResidualPair(arith.bits(a), arith.bits(b))
        }
        ProbeId::SumResidual(n) => Payload::Residual(arith.bits(probe_sum_residual(arith, n)?)),
        ProbeId::LogisticDefault => Payload::Bits(arith.bits(probe_logistic(
            arith,
            numeric::LOGISTIC_R,
            numeric::LOGISTIC_X0,
            numeric::LOGISTIC_STEPS,
        )?)),
        ProbeId::PopcountTiming => Payload::Timing(probe_popcount_timing(opts.timing_iterations, opts.timing_samples)?),
    })
}

fn run_id(id: ProbeId, backend: &Backend, opts: &BatteryOptions) -> Result<Payload, ProbeError> {
    match backend {
        Backend::Native64 => run_on(id, &Native64, opts),
        Backend::Native32 => run_on(id, &Native32, opts),
        Backend::Emulated(cfg) => run_on(id, &Emulator::new(*cfg), opts),
    }
}

/// Runs one registered probe with its battery defaults.
pub fn run_probe(probe_id: &str, backend: &Backend) -> Result<ProbeResult, ProbeError> {
    let id: ProbeId = probe_id.parse()?;
    let payload = run_id(id, backend, &BatteryOptions::default())?;
    Ok(ProbeResult::new(id.to_string(), backend.label(), payload))
}

/// Runs every registered probe in canonical order. A failing probe is
/// recorded as an error payload and the battery continues.
pub fn run_battery(backend: &Backend, opts: &BatteryOptions) -> Vec<ProbeResult> {
    ProbeId::registry()
        .into_iter()
        .filter(|id| opts.include_timing || id.is_deterministic())
        .map(|id| {
            let payload = run_id(id, backend, opts).unwrap_or_else(|e| Payload::Error(e.to_string()));
            ProbeResult::new(id.to_string(), backend.label(), payload)
        })
        .collect()
}

/// Truncated decimal rendering with `digits` significant digits, in the
/// style of hand-copied result tables (`0.375`, `-8.05e8`).
pub fn render_decimal(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x < 0.0 { "-inf".into() } else { "inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0.0".into()
        } else {
            "0.0".into()
        };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits + 8, x.abs());
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let sig: String = mant.chars().filter(char::is_ascii_digit).take(digits).collect();
    let sign = if x < 0.0 { "-" } else { "" };
    if (-1..3).contains(&exp) {
        if exp < 0 {
            format!("{sign}0.{sig}")
        } else {
            let split = (exp as usize + 1).min(sig.len());
            let (int, frac) = sig.split_at(split);
            if frac.is_empty() {
                format!("{sign}{int}")
            } else {
                format!("{sign}{int}.{frac}")
            }
        }
    } else {
        let (lead, rest) = sig.split_at(1);
        if rest.is_empty() {
            format!("{sign}{lead}e{exp}")
        } else {
            format!("{sign}{lead}.{rest}e{exp}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_stable() {
        let ids: Vec<String> = ProbeId::registry().iter().map(ToString::to_string).collect();
        assert_eq!(ids.len(), 25);
        assert_eq!(ids[0], "sqrt-identity");
        assert_eq!(ids[3], "sin-k10-pi1");
        assert_eq!(ids[14], "sin-k37-pi4");
        assert_eq!(ids[17], "sum-residual-10");
        assert_eq!(ids.last().unwrap(), "popcount-timing");
        for id in &ids {
            assert_eq!(&id.parse::<ProbeId>().unwrap().to_string(), id);
        }
        assert!("sum-residual-7".parse::<ProbeId>().is_err());
    }

    #[test]
    fn backend_names() {
        assert_eq!("native64".parse::<Backend>().unwrap(), Backend::Native64);
        assert_eq!("native-binary32".parse::<Backend>().unwrap(), Backend::Native32);
        assert_eq!(
            "sig24exp8-ne".parse::<Backend>().unwrap(),
            Backend::Emulated(FpConfig::BINARY32)
        );
        assert!("bogus".parse::<Backend>().is_err());
    }

    #[test]
    fn unknown_probe() {
        assert!(matches!(
            run_probe("fdiv-bug", &Backend::Native64),
            Err(ProbeError::UnknownProbe(_))
        ));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(render_decimal(0.375794, 3), "0.375");
        assert_eq!(render_decimal(-0.8322, 3), "-0.832");
        assert_eq!(render_decimal(-805_123_456.0, 3), "-8.05e8");
        assert_eq!(render_decimal(4.97e86, 3), "4.97e86");
        assert_eq!(render_decimal(12.345, 3), "12.3");
        assert_eq!(render_decimal(1783.0, 4), "1.783e3");
        assert_eq!(render_decimal(0.0, 3), "0.0");
        assert_eq!(render_decimal(-2.7481e-8, 3), "-2.74e-8");
    }
}
