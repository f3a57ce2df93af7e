//! Recover radix and precision from arithmetic behaviour alone, across a
//! range of emulated formats.

use procscope::emul::{Emulator, FpConfig, Rounding};
use procscope::fpcore::Native64;
use procscope::probes::numeric::probe_gentleman;

fn main() {
    let g = probe_gentleman(&Native64);
    println!("native64: mantissa bits {} base {}", g.mantissa_bits, g.base);
    for (p, e) in [(11, 5), (24, 8), (40, 9), (53, 11), (64, 15)] {
        for r in [Rounding::NearestEven, Rounding::TowardZero] {
            let cfg = FpConfig::new(p, e, r).unwrap();
            let g = probe_gentleman(&Emulator::new(cfg));
            println!("{:<16} -> {},{}", cfg.name(), g.mantissa_bits, g.base);
        }
    }
}
