//! Arithmetic backends: the native FPU at binary64/binary32 and (in
//! [`crate::emul`]) a parametric software emulator. Probes are written once,
//! generically over [`Arith`].

use std::fmt::Debug;

use thiserror::Error;

use super::bits::BitPattern;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed decimal literal {0:?}")]
pub struct LiteralError(pub String);

/// One working precision with one rounding per primitive operation.
///
/// Implementations must never fuse operations on their own; fusion happens
/// only through [`Arith::fma`] when [`Arith::contracts`] reports true.
#[allow(clippy::wrong_self_convention)]
pub trait Arith {
    type Value: Copy + Debug;

    /// Backend label recorded in every probe result.
    fn label(&self) -> String;

    /// `(exponent_bits, significand_bits)` of the working format,
    /// significand including the implicit leading bit.
    fn format(&self) -> (u32, u32);

    /// Correctly rounded value of a decimal literal.
    fn literal(&self, decimal: &str) -> Result<Self::Value, LiteralError>;
    fn from_i64(&self, n: i64) -> Self::Value;
    /// Rounds a binary64 value into the working format.
    fn from_f64(&self, x: f64) -> Self::Value;
    /// Correctly rounded `10^k`, i.e. the value of the literal `1ek`.
    fn pow10(&self, k: u32) -> Self::Value;

    fn add(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn sub(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn mul(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn div(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn sqrt(&self, a: Self::Value) -> Self::Value;
    fn sin(&self, a: Self::Value) -> Self::Value;
    fn neg(&self, a: Self::Value) -> Self::Value;
    /// `a * b + c` with a single rounding.
    fn fma(&self, a: Self::Value, b: Self::Value, c: Self::Value) -> Self::Value;
    /// Whether a multiply feeding straight into an add may be fused.
    fn contracts(&self) -> bool {
        false
    }

    /// IEEE equality: NaN is unequal to everything, `+0 == -0`.
    fn eq(&self, a: Self::Value, b: Self::Value) -> bool;
    fn is_nan(&self, a: Self::Value) -> bool;
    fn bits(&self, a: Self::Value) -> BitPattern;
    /// Nearest binary64 value, for reporting only.
    fn to_f64(&self, a: Self::Value) -> f64;
}

/// Host binary64 arithmetic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Native64;

/// Host binary32 arithmetic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Native32;

pub const NATIVE64_LABEL: &str = "native-binary64";
pub const NATIVE32_LABEL: &str = "native-binary32";

impl Arith for Native64 {
    type Value = f64;

    fn label(&self) -> String {
        NATIVE64_LABEL.into()
    }
    fn format(&self) -> (u32, u32) {
        (11, 53)
    }
    fn literal(&self, decimal: &str) -> Result<f64, LiteralError> {
        decimal.parse().map_err(|_| LiteralError(decimal.into()))
    }
    fn from_i64(&self, n: i64) -> f64 {
        n as f64
    }
    fn from_f64(&self, x: f64) -> f64 {
        x
    }
    fn pow10(&self, k: u32) -> f64 {
        format!("1e{k}").parse().expect("well-formed literal")
    }
    fn add(&self, a: f64, b: f64) -> f64 {
        a + b
    }
    fn sub(&self, a: f64, b: f64) -> f64 {
        a - b
    }
    fn mul(&self, a: f64, b: f64) -> f64 {
        a * b
    }
    fn div(&self, a: f64, b: f64) -> f64 {
        a / b
    }
    fn sqrt(&self, a: f64) -> f64 {
        a.sqrt()
    }
    fn sin(&self, a: f64) -> f64 {
        a.sin()
    }
    fn neg(&self, a: f64) -> f64 {
        -a
    }
    fn fma(&self, a: f64, b: f64, c: f64) -> f64 {
        a.mul_add(b, c)
    }
    fn eq(&self, a: f64, b: f64) -> bool {
        a == b
    }
    fn is_nan(&self, a: f64) -> bool {
        a.is_nan()
    }
    fn bits(&self, a: f64) -> BitPattern {
        BitPattern::from_f64(a)
    }
    fn to_f64(&self, a: f64) -> f64 {
        a
    }
}

impl Arith for Native32 {
    type Value = f32;

    fn label(&self) -> String {
        NATIVE32_LABEL.into()
    }
    fn format(&self) -> (u32, u32) {
        (8, 24)
    }
    fn literal(&self, decimal: &str) -> Result<f32, LiteralError> {
        decimal.parse().map_err(|_| LiteralError(decimal.into()))
    }
    fn from_i64(&self, n: i64) -> f32 {
        n as f32
    }
    fn from_f64(&self, x: f64) -> f32 {
        x as f32
    }
    fn pow10(&self, k: u32) -> f32 {
        format!("1e{k}").parse().expect("well-formed literal")
    }
    fn add(&self, a: f32, b: f32) -> f32 {
        a + b
    }
    fn sub(&self, a: f32, b: f32) -> f32 {
        a - b
    }
    fn mul(&self, a: f32, b: f32) -> f32 {
        a * b
    }
    fn div(&self, a: f32, b: f32) -> f32 {
        a / b
    }
    fn sqrt(&self, a: f32) -> f32 {
        a.sqrt()
    }
    fn sin(&self, a: f32) -> f32 {
        a.sin()
    }
    fn neg(&self, a: f32) -> f32 {
        -a
    }
    fn fma(&self, a: f32, b: f32, c: f32) -> f32 {
        a.mul_add(b, c)
    }
    fn eq(&self, a: f32, b: f32) -> bool {
        a == b
    }
    fn is_nan(&self, a: f32) -> bool {
        a.is_nan()
    }
    fn bits(&self, a: f32) -> BitPattern {
        BitPattern::from_f32(a)
    }
    fn to_f64(&self, a: f32) -> f64 {
        a as f64
    }
}
