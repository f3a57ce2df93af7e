//! Floating-point environment fingerprinting.
//!
//! A battery of small numerical probes (square-root identity, Gentleman's
//! radix/precision loops, cancellation-prone polynomials, large-argument
//! sines, residual sums, a chaotic logistic trajectory) is run against an
//! arithmetic backend and captured bit-exactly. The results form a
//! canonical fingerprint that can be serialized, diffed, matched against a
//! weighted signature database, or used to gate control flow. A parametric
//! software float emulator serves as the oracle for the native results and
//! synthesizes fingerprints for arithmetic that is not at hand.
//!
//! ```
//! use procscope::probes::{run_battery, Backend, BatteryOptions};
//! use procscope::fingerprint::Fingerprint;
//!
//! let results = run_battery(&Backend::Native64, &BatteryOptions::deterministic_only());
//! let fp = Fingerprint::assemble(&Backend::Native64, results).unwrap();
//! assert!(fp.get("gentleman").is_some());
//! ```

pub mod cli;
pub mod emul;
pub mod fingerprint;
pub mod fpcore;
pub mod fphash;
pub mod probes;
