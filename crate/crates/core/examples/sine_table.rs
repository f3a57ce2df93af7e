//! sin(10^k * pi) for four approximations of pi. The product has no
//! significant digits left, so the result exposes how the multiply and the
//! argument reduction behave.

use procscope::emul::{Emulator, FpConfig, SinStrategy};
use procscope::fpcore::{Arith, Native64, PiConstant};
use procscope::probes::numeric::probe_sin;
use procscope::probes::SIN_EXPONENTS;

fn table<A: Arith>(name: &str, a: &A) {
    println!("{name}");
    for k in SIN_EXPONENTS {
        let row: Vec<String> = PiConstant::ALL
            .iter()
            .map(|&pi| {
                let v = probe_sin(a, k, pi);
                format!("{:>10.6} {}", a.to_f64(v), a.bits(v))
            })
            .collect();
        println!("  k={k:<2} {}", row.join("  "));
    }
}

fn main() {
    table("native64", &Native64);
    for s in SinStrategy::ALL {
        table(
            &format!("binary64 sin={}", s.tag()),
            &Emulator::new(FpConfig::BINARY64.with_sin(s)),
        );
    }
    table("binary32", &Emulator::new(FpConfig::BINARY32));
}
