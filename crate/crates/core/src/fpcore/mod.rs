//! Bit-exact floating-point primitives shared by every backend.

pub mod arith;
pub mod bits;
pub mod consts;
pub mod eval;
pub mod exact;

pub use arith::{Arith, LiteralError, Native32, Native64};
pub use bits::{from_bits, from_bits32, to_bits, to_bits32, BitPattern, EncodingError};
pub use consts::PiConstant;
pub use eval::{eval_ordered, EvalBuilder, EvalError, EvalOrder, Slot, Step};
