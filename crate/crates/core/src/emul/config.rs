use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rounding {
    NearestEven,
    TowardZero,
    TowardPositive,
    TowardNegative,
}

impl Rounding {
    pub const ALL: [Rounding; 4] = [
        Self::NearestEven,
        Self::TowardZero,
        Self::TowardPositive,
        Self::TowardNegative,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::NearestEven => "ne",
            Self::TowardZero => "tz",
            Self::TowardPositive => "up",
            Self::TowardNegative => "dn",
        }
    }

    fn from_tag(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.tag() == s)
    }
}

/// How `emu_sin` reduces its argument and evaluates the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SinStrategy {
    /// Reduction against a π accurate well beyond the input's magnitude,
    /// then a high-precision kernel rounded once: a correctly rounded sine.
    #[default]
    PayneHanek,
    /// Exact `fmod` against 2π rounded to the working precision, then the
    /// correctly rounded kernel on the remainder.
    NaiveMod2Pi,
    /// Same reduction, folded into [-π, π] and summed as a Taylor series
    /// with every operation rounded in the working precision.
    TaylorAfterNaiveReduction,
}

impl SinStrategy {
    pub const ALL: [SinStrategy; 3] = [Self::PayneHanek, Self::NaiveMod2Pi, Self::TaylorAfterNaiveReduction];

    pub fn tag(self) -> &'static str {
        match self {
            Self::PayneHanek => "ph",
            Self::NaiveMod2Pi => "naive",
            Self::TaylorAfterNaiveReduction => "taylor",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("significand bits {0} outside 8..=64")]
    SignificandBits(u32),
    #[error("exponent bits {0} outside 5..=15")]
    ExponentBits(u32),
    #[error("unrecognized configuration name {0:?}")]
    Name(String),
}

/// Parametric description of a binary floating-point arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpConfig {
    significand_bits: u32,
    exponent_bits: u32,
    pub rounding: Rounding,
    pub fma_enabled: bool,
    pub sin_strategy: SinStrategy,
}

impl FpConfig {
    pub const BINARY32: FpConfig = FpConfig {
        significand_bits: 24,
        exponent_bits: 8,
        rounding: Rounding::NearestEven,
        fma_enabled: false,
        sin_strategy: SinStrategy::PayneHanek,
    };

    pub const BINARY64: FpConfig = FpConfig {
        significand_bits: 53,
        exponent_bits: 11,
        rounding: Rounding::NearestEven,
        fma_enabled: false,
        sin_strategy: SinStrategy::PayneHanek,
    };

    /// x87-style 64-bit significand with a 15-bit exponent.
    pub const SIG64: FpConfig = FpConfig {
        significand_bits: 64,
        exponent_bits: 15,
        rounding: Rounding::NearestEven,
        fma_enabled: false,
        sin_strategy: SinStrategy::PayneHanek,
    };

    pub fn new(significand_bits: u32, exponent_bits: u32, rounding: Rounding) -> Result<Self, ConfigError> {
        if !(8..=64).contains(&significand_bits) {
            return Err(ConfigError::SignificandBits(significand_bits));
        }
        if !(5..=15).contains(&exponent_bits) {
            return Err(ConfigError::ExponentBits(exponent_bits));
        }
        Ok(Self {
            significand_bits,
            exponent_bits,
            rounding,
            fma_enabled: false,
            sin_strategy: SinStrategy::PayneHanek,
        })
    }

    pub fn with_fma(mut self, on: bool) -> Self {
        self.fma_enabled = on;
        self
    }

    pub fn with_sin(mut self, s: SinStrategy) -> Self {
        self.sin_strategy = s;
        self
    }

    pub fn with_rounding(mut self, r: Rounding) -> Self {
        self.rounding = r;
        self
    }

    pub fn significand_bits(&self) -> u32 {
        self.significand_bits
    }

    pub fn exponent_bits(&self) -> u32 {
        self.exponent_bits
    }

    /// Encoding width: sign + exponent + trailing significand.
    pub fn width(&self) -> u32 {
        self.exponent_bits + self.significand_bits
    }

    pub fn bias(&self) -> i64 {
        (1i64 << (self.exponent_bits - 1)) - 1
    }

    pub fn emax(&self) -> i64 {
        self.bias()
    }

    pub fn emin(&self) -> i64 {
        1 - self.bias()
    }

    /// Exponent of the least significant bit of the smallest subnormal.
    pub fn qmin(&self) -> i64 {
        self.emin() - (self.significand_bits as i64 - 1)
    }

    /// Canonical name; parses back to the same configuration.
    pub fn name(&self) -> String {
        if *self == Self::BINARY32 {
            return "binary32".into();
        }
        if *self == Self::BINARY64 {
            return "binary64".into();
        }
        let mut s = format!(
            "sig{}exp{}-{}",
            self.significand_bits,
            self.exponent_bits,
            self.rounding.tag()
        );
        if self.fma_enabled {
            s.push_str("-fma");
        }
        if self.sin_strategy != SinStrategy::PayneHanek {
            s.push('-');
            s.push_str(self.sin_strategy.tag());
        }
        s
    }
}

impl fmt::Display for FpConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for FpConfig {
    type Err = ConfigError;

    /// Accepts `binary32`, `binary64`, or `sig<N>exp<M>`, followed by
    /// optional `-<rounding>` (`ne`, `tz`, `up`, `dn`), `-fma`, and a sine
    /// strategy tag (`-ph`, `-naive`, `-taylor`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::Name(s.to_owned());
        let mut parts = s.split('-');
        let base = parts.next().ok_or_else(bad)?;
        let mut cfg = match base {
            "binary32" => Self::BINARY32,
            "binary64" => Self::BINARY64,
            _ => {
                let rest = base.strip_prefix("sig").ok_or_else(bad)?;
                let (sig, exp) = rest.split_once("exp").ok_or_else(bad)?;
                let sig: u32 = sig.parse().map_err(|_| bad())?;
                let exp: u32 = exp.parse().map_err(|_| bad())?;
                Self::new(sig, exp, Rounding::NearestEven)?
            }
        };
        for part in parts {
            if let Some(r) = Rounding::from_tag(part) {
                cfg.rounding = r;
            } else if part == "fma" {
                cfg.fma_enabled = true;
            } else if let Some(st) = SinStrategy::ALL.into_iter().find(|x| x.tag() == part) {
                cfg.sin_strategy = st;
            } else {
                return Err(bad());
            }
        }
        Ok(cfg)
    }
}
