//! The deterministic probes, written once over any [`Arith`] backend.

use std::collections::BTreeMap;

use super::ProbeError;
use crate::fpcore::arith::Arith;
use crate::fpcore::consts::PiConstant;
use crate::fpcore::eval::{eval_ordered, EvalOrder};

pub const GENTLEMAN_DOUBLING_CAP: u32 = 128;
pub const GENTLEMAN_BASE_CAP: u32 = 64;

pub const RUMP_X: &str = "192119201";
pub const RUMP_Y: &str = "35675640";
pub const RUMP_F_EXACT: i64 = 1783;

pub const LOGISTIC_R: f64 = 3.999;
pub const LOGISTIC_X0: f64 = 0.5;
pub const LOGISTIC_STEPS: u32 = 1000;

pub const SUM_RESIDUAL_MAX_N: u32 = 308;

/// `sqrt(a) * sqrt(a) == a`, with exactly two roundings.
pub fn probe_sqrt_identity<A: Arith>(arith: &A, a: A::Value) -> Result<bool, ProbeError> {
    let x = arith.to_f64(a);
    if x.is_nan() || x < 0.0 || x.is_infinite() {
        return Err(ProbeError::Domain(format!(
            "sqrt identity needs finite a >= 0, got {x}"
        )));
    }
    let r = arith.sqrt(a);
    let b = arith.mul(r, r);
    Ok(arith.eq(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GentlemanOutcome {
    pub mantissa_bits: u32,
    pub base: u32,
    /// An iteration cap was reached: non-binary or anomalous arithmetic.
    pub anomalous: bool,
}

/// Significand width and radix detector.
///
/// Loop 1 doubles `A` while `((A + 1) - A) - 1 == 0`; the number of
/// doublings is `log2(A)` at exit. Loop 2 increments `B` from 1 while
/// `((A + B) - A) - B != 0`; the final `B` is the radix.
pub fn probe_gentleman<A: Arith>(arith: &A) -> GentlemanOutcome {
    let one = arith.from_i64(1);
    let two = arith.from_i64(2);
    let zero = arith.from_i64(0);
    let mut a = one;
    let mut doublings = 0u32;
    let mut anomalous = false;
    loop {
        let t = arith.sub(arith.sub(arith.add(a, one), a), one);
        if !arith.eq(t, zero) {
            break;
        }
        if doublings == GENTLEMAN_DOUBLING_CAP {
            anomalous = true;
            break;
        }
        a = arith.mul(two, a);
        doublings += 1;
    }
    let mut b = one;
    let mut base = 1u32;
    loop {
        let t = arith.sub(arith.sub(arith.add(a, b), a), b);
        if arith.eq(t, zero) {
            break;
        }
        if base == GENTLEMAN_BASE_CAP {
            anomalous = true;
            break;
        }
        b = arith.add(b, one);
        base += 1;
    }
    GentlemanOutcome {
        mantissa_bits: doublings,
        base,
        anomalous,
    }
}

/// The four "easy" comparisons, each evaluated left to right:
/// `1.2-0.8 == 0.4`, `0.1+0.1 == 0.2`, `0.1+0.1+0.1 == 0.3`, and a
/// ten-term left fold of 0.1 compared with 1.0.
pub fn probe_easy_computations<A: Arith>(arith: &A) -> [bool; 4] {
    let lit = |s: &str| arith.literal(s).expect("static literal");
    let tenth = lit("0.1");
    let first = arith.eq(arith.sub(lit("1.2"), lit("0.8")), lit("0.4"));
    let second = arith.eq(arith.add(tenth, tenth), lit("0.2"));
    let third = arith.eq(arith.add(arith.add(tenth, tenth), tenth), lit("0.3"));
    let ten = (1..10).fold(tenth, |acc, _| arith.add(acc, tenth));
    let fourth = arith.eq(ten, lit("1.0"));
    [first, second, third, fourth]
}

/// `sin(10^k * pi)`: `10^k` is the correctly rounded power (the value of
/// the literal `1ek`), the product is rounded once, then the backend sine.
pub fn probe_sin<A: Arith>(arith: &A, k: u32, pi: PiConstant) -> A::Value {
    let p = arith.literal(pi.literal()).expect("static literal");
    let x = arith.mul(arith.pow10(k), p);
    arith.sin(x)
}

/// `(1682*X*Y^4 + 3*X^3 + 29*X*Y^2 - 2*X^5 + 832) / 107751`, terms left
/// to right, each power by ascending iterated multiplication.
pub fn rump_f_expr() -> EvalOrder {
    let mut b = EvalOrder::builder();
    let x = b.input("X");
    let y = b.input("Y");
    let y4 = b.pow(y, 4);
    let c1682 = b.constant("1682");
    let a = b.mul(c1682, x);
    let t1 = b.mul(a, y4);
    let x3 = b.pow(x, 3);
    let c3 = b.constant("3");
    let t2 = b.mul(c3, x3);
    let s = b.add(t1, t2);
    let y2 = b.pow(y, 2);
    let c29 = b.constant("29");
    let c = b.mul(c29, x);
    let t3 = b.mul(c, y2);
    let s = b.add(s, t3);
    let x5 = b.pow(x, 5);
    let c2 = b.constant("2");
    let t4 = b.mul(c2, x5);
    let s = b.sub(s, t4);
    let c832 = b.constant("832");
    let s = b.add(s, c832);
    let d = b.constant("107751");
    b.div(s, d);
    b.finish().expect("well-formed expression")
}

/// `8118*X^4 - 11482*X^3 + X^2 + 5741*X - 2030`, left to right.
pub fn rump_p_expr() -> EvalOrder {
    let mut b = EvalOrder::builder();
    let x = b.input("X");
    let x4 = b.pow(x, 4);
    let c = b.constant("8118");
    let t1 = b.mul(c, x4);
    let x3 = b.pow(x, 3);
    let c = b.constant("11482");
    let t2 = b.mul(c, x3);
    let s = b.sub(t1, t2);
    let x2 = b.pow(x, 2);
    let s = b.add(s, x2);
    let c = b.constant("5741");
    let t4 = b.mul(c, x);
    let s = b.add(s, t4);
    let c = b.constant("2030");
    b.sub(s, c);
    b.finish().expect("well-formed expression")
}

pub fn probe_rump_f<A: Arith>(arith: &A) -> A::Value {
    let inputs: BTreeMap<String, A::Value> = [
        ("X".to_string(), arith.literal(RUMP_X).expect("static literal")),
        ("Y".to_string(), arith.literal(RUMP_Y).expect("static literal")),
    ]
    .into();
    eval_ordered(&rump_f_expr(), &inputs, arith).expect("all inputs bound")
}

/// `P` at `X = sqrt(0.5)` (computed in the backend) and at `X = 0.707`.
pub fn probe_rump_p<A: Arith>(arith: &A) -> (A::Value, A::Value) {
    let expr = rump_p_expr();
    let at = |x: A::Value| {
        let inputs: BTreeMap<String, A::Value> = [("X".to_string(), x)].into();
        eval_ordered(&expr, &inputs, arith).expect("all inputs bound")
    };
    let root_half = arith.sqrt(arith.literal("0.5").expect("static literal"));
    (at(root_half), at(arith.literal("0.707").expect("static literal")))
}

/// `s - n * 10^n` where `s` is a left fold of `n` copies of `10^n`.
///
/// `10^n` is the correctly rounded power; `n * t` is rounded once (or fused
/// into the subtraction when the backend contracts).
pub fn probe_sum_residual<A: Arith>(arith: &A, n: u32) -> Result<A::Value, ProbeError> {
    if !(1..=SUM_RESIDUAL_MAX_N).contains(&n) {
        return Err(ProbeError::Domain(format!(
            "sum residual needs 1 <= n <= {SUM_RESIDUAL_MAX_N}, got {n}"
        )));
    }
    let t = arith.pow10(n);
    let s = (1..n).fold(t, |acc, _| arith.add(acc, t));
    let count = arith.from_i64(n as i64);
    Ok(if arith.contracts() {
        arith.fma(arith.neg(count), t, s)
    } else {
        arith.sub(s, arith.mul(count, t))
    })
}

/// One logistic step `x <- (r * x) * (1 - x)`, three roundings.
pub fn logistic_step<A: Arith>(arith: &A, r: A::Value, one: A::Value, x: A::Value) -> A::Value {
    let rest = arith.sub(one, x);
    let rx = arith.mul(r, x);
    arith.mul(rx, rest)
}

pub fn probe_logistic<A: Arith>(arith: &A, r: f64, x0: f64, steps: u32) -> Result<A::Value, ProbeError> {
    if !(0.0..=4.0).contains(&r) || !(0.0..=1.0).contains(&x0) || steps == 0 {
        return Err(ProbeError::Domain(format!(
            "logistic needs 0<=r<=4, 0<=x0<=1, steps>=1; got r={r}, x0={x0}, steps={steps}"
        )));
    }
    let r = arith.from_f64(r);
    let one = arith.from_i64(1);
    let mut x = arith.from_f64(x0);
    for _ in 0..steps {
        x = logistic_step(arith, r, one, x);
    }
    Ok(x)
}
