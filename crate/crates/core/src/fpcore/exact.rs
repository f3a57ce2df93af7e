//! Exact rational evaluation of an [`EvalOrder`]: the arbitrary-precision
//! reference that finite-precision results are judged against.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::eval::{EvalOrder, Step};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("input {0:?} is not bound")]
    Unbound(String),
    #[error("malformed decimal literal {0:?}")]
    Literal(String),
    #[error("step {0} is not rational ({1})")]
    Irrational(usize, &'static str),
    #[error("step {0} divides by zero")]
    DivisionByZero(usize),
}

/// Parses `[-+]digits[.digits][(e|E)[-+]digits]` into an exact rational.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let scale = exp as i64 - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let mut den = BigInt::one();
    if scale >= 0 {
        num *= num_traits::pow(ten, scale as usize);
    } else {
        den = num_traits::pow(ten, (-scale) as usize);
    }
    if neg {
        num = -num;
    }
    Some(BigRational::new(num, den))
}

/// Exact value of `expr`. Fails on `Sqrt`/`Sin` steps, which have no
/// rational result in general.
pub fn eval_exact(expr: &EvalOrder, inputs: &BTreeMap<String, BigRational>) -> Result<BigRational, ExactError> {
    let mut slots: Vec<BigRational> = Vec::with_capacity(expr.steps().len());
    for (i, step) in expr.steps().iter().enumerate() {
        let v = match step {
            Step::Input(name) => inputs
                .get(name)
                .cloned()
                .ok_or_else(|| ExactError::Unbound(name.clone()))?,
            Step::Const(lit) => parse_decimal(lit).ok_or_else(|| ExactError::Literal(lit.clone()))?,
            Step::Add(a, b) => &slots[*a] + &slots[*b],
            Step::Sub(a, b) => &slots[*a] - &slots[*b],
            Step::Mul(a, b) => &slots[*a] * &slots[*b],
            Step::Div(a, b) => {
                if slots[*b].is_zero() {
                    return Err(ExactError::DivisionByZero(i));
                }
                &slots[*a] / &slots[*b]
            }
            Step::Pow(a, n) => num_traits::pow(slots[*a].clone(), *n as usize),
            Step::Sqrt(_) => return Err(ExactError::Irrational(i, "sqrt")),
            Step::Sin(_) => return Err(ExactError::Irrational(i, "sin")),
        };
        slots.push(v);
    }
    Ok(slots.pop().expect("EvalOrder is never empty"))
}

/// Rational within `2^-bits` of `sqrt(q)` (rounded down), `q >= 0`.
pub fn sqrt_approx(q: &BigRational, bits: u32) -> BigRational {
    assert!(!q.is_negative(), "sqrt_approx of a negative rational");
    let scale = BigUint::one() << (2 * bits as usize);
    let scaled = (q * BigRational::from_integer(BigInt::from(scale)))
        .floor()
        .to_integer();
    let root = scaled.magnitude().sqrt();
    BigRational::new(BigInt::from(root), BigInt::one() << bits as usize)
}
