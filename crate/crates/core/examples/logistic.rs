//! The logistic map at r = 3.999 amplifies the last bit of every step.
//! binary32 and binary64 part ways within a few dozen iterations.

use procscope::emul::{Emulator, FpConfig};
use procscope::fpcore::{Arith, Native32, Native64};
use procscope::probes::numeric::{probe_logistic, LOGISTIC_R, LOGISTIC_X0};

fn main() {
    let wide = Emulator::new(FpConfig::SIG64);
    println!("{:>5} {:>12} {:>12} {:>12}", "n", "binary32", "binary64", "sig64exp15");
    for n in [1, 10, 20, 30, 40, 50, 100, 1000] {
        let a = probe_logistic(&Native32, LOGISTIC_R, LOGISTIC_X0, n).unwrap();
        let b = probe_logistic(&Native64, LOGISTIC_R, LOGISTIC_X0, n).unwrap();
        let c = wide.to_f64(probe_logistic(&wide, LOGISTIC_R, LOGISTIC_X0, n).unwrap());
        println!("{n:>5} {a:>12.6} {b:>12.6} {c:>12.6}");
    }
    let fixed = probe_logistic(&Native64, 2.0, 0.5, 100).unwrap();
    println!("r=2 stays at {}", Native64.to_f64(fixed));
}
