//! Straight-line expressions with a pinned evaluation order.
//!
//! An [`EvalOrder`] is a list of primitive steps. Step `i` writes slot `i`
//! and may only read earlier slots, so the order of every rounding is fixed
//! by construction. Powers are expanded to ascending iterated products
//! (`x`, `x*x`, `(x*x)*x`, ...).

use std::collections::BTreeMap;

use thiserror::Error;

use super::arith::{Arith, LiteralError};

pub type Slot = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Input(String),
    /// Decimal literal, correctly rounded into the backend.
    Const(String),
    Add(Slot, Slot),
    Sub(Slot, Slot),
    Mul(Slot, Slot),
    Div(Slot, Slot),
    Sqrt(Slot),
    Sin(Slot),
    /// `base^n` by `n - 1` left-to-right multiplications, `n >= 1`.
    Pow(Slot, u32),
}

impl Step {
    fn operands(&self) -> Vec<Slot> {
        match self {
            Step::Input(_) | Step::Const(_) => vec![],
            Step::Add(a, b) | Step::Sub(a, b) | Step::Mul(a, b) | Step::Div(a, b) => vec![*a, *b],
            Step::Sqrt(a) | Step::Sin(a) | Step::Pow(a, _) => vec![*a],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("input {0:?} is not bound")]
    Unbound(String),
    #[error("step {step} reads slot {slot} before it is written")]
    ForwardReference { step: usize, slot: Slot },
    #[error("power step {0} has exponent 0")]
    ZeroPower(usize),
    #[error("expression is empty")]
    Empty,
    #[error(transparent)]
    Literal(#[from] LiteralError),
}

/// A validated straight-line program; the last step is the result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOrder {
    steps: Vec<Step>,
}

impl EvalOrder {
    pub fn new(steps: Vec<Step>) -> Result<Self, EvalError> {
        if steps.is_empty() {
            return Err(EvalError::Empty);
        }
        for (i, step) in steps.iter().enumerate() {
            if let Some(&slot) = step.operands().iter().find(|&&s| s >= i) {
                return Err(EvalError::ForwardReference { step: i, slot });
            }
            if matches!(step, Step::Pow(_, 0)) {
                return Err(EvalError::ZeroPower(i));
            }
        }
        Ok(Self { steps })
    }

    pub fn builder() -> EvalBuilder {
        EvalBuilder::default()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Names of all `Input` steps, in first-use order.
    pub fn inputs(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for step in &self.steps {
            if let Step::Input(name) = step {
                if !names.contains(&name.as_str()) {
                    names.push(name);
                }
            }
        }
        names
    }

    fn use_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.steps.len()];
        for step in &self.steps {
            for s in step.operands() {
                counts[s] += 1;
            }
        }
        counts
    }
}

/// Incremental construction; every method returns the slot it wrote.
#[derive(Debug, Default, Clone)]
pub struct EvalBuilder {
    steps: Vec<Step>,
}

impl EvalBuilder {
    fn push(&mut self, step: Step) -> Slot {
        self.steps.push(step);
        self.steps.len() - 1
    }
    pub fn input(&mut self, name: &str) -> Slot {
        self.push(Step::Input(name.into()))
    }
    pub fn constant(&mut self, decimal: &str) -> Slot {
        self.push(Step::Const(decimal.into()))
    }
    pub fn add(&mut self, a: Slot, b: Slot) -> Slot {
        self.push(Step::Add(a, b))
    }
    pub fn sub(&mut self, a: Slot, b: Slot) -> Slot {
        self.push(Step::Sub(a, b))
    }
    pub fn mul(&mut self, a: Slot, b: Slot) -> Slot {
        self.push(Step::Mul(a, b))
    }
    pub fn div(&mut self, a: Slot, b: Slot) -> Slot {
        self.push(Step::Div(a, b))
    }
    pub fn sqrt(&mut self, a: Slot) -> Slot {
        self.push(Step::Sqrt(a))
    }
    pub fn sin(&mut self, a: Slot) -> Slot {
        self.push(Step::Sin(a))
    }
    pub fn pow(&mut self, a: Slot, n: u32) -> Slot {
        self.push(Step::Pow(a, n))
    }
    pub fn finish(self) -> Result<EvalOrder, EvalError> {
        EvalOrder::new(self.steps)
    }
}

/// Evaluates `expr` step by step with one rounding per primitive.
///
/// When the backend contracts, an `Add`/`Sub` whose operand is the `Mul`
/// written by the immediately preceding step (and read nowhere else) is
/// evaluated as a single fused multiply-add. Division by zero and invalid
/// operations yield the IEEE default results; nothing traps.
pub fn eval_ordered<A: Arith>(
    expr: &EvalOrder,
    inputs: &BTreeMap<String, A::Value>,
    backend: &A,
) -> Result<A::Value, EvalError> {
    let uses = expr.use_counts();
    let mut slots: Vec<A::Value> = Vec::with_capacity(expr.steps.len());
    for (i, step) in expr.steps.iter().enumerate() {
        let fusable = |s: Slot| {
            backend.contracts() && i > 0 && s == i - 1 && uses[s] == 1 && matches!(expr.steps[s], Step::Mul(..))
        };
        let product = |s: Slot| match expr.steps[s] {
            Step::Mul(x, y) => (slots[x], slots[y]),
            _ => unreachable!("fusable checked the step kind"),
        };
        let v = match step {
            Step::Input(name) => *inputs.get(name).ok_or_else(|| EvalError::Unbound(name.clone()))?,
            Step::Const(lit) => backend.literal(lit)?,
            Step::Add(a, b) if fusable(*b) => {
                let (x, y) = product(*b);
                backend.fma(x, y, slots[*a])
            }
            Step::Add(a, b) if fusable(*a) => {
                let (x, y) = product(*a);
                backend.fma(x, y, slots[*b])
            }
            Step::Sub(a, b) if fusable(*b) => {
                let (x, y) = product(*b);
                backend.fma(backend.neg(x), y, slots[*a])
            }
            Step::Sub(a, b) if fusable(*a) => {
                let (x, y) = product(*a);
                backend.fma(x, y, backend.neg(slots[*b]))
            }
            Step::Add(a, b) => backend.add(slots[*a], slots[*b]),
            Step::Sub(a, b) => backend.sub(slots[*a], slots[*b]),
            Step::Mul(a, b) => backend.mul(slots[*a], slots[*b]),
            Step::Div(a, b) => backend.div(slots[*a], slots[*b]),
            Step::Sqrt(a) => backend.sqrt(slots[*a]),
            Step::Sin(a) => backend.sin(slots[*a]),
            Step::Pow(a, n) => {
                let base = slots[*a];
                (1..*n).fold(base, |acc, _| backend.mul(acc, base))
            }
        };
        slots.push(v);
    }
    slots.pop().ok_or(EvalError::Empty)
}
