//! n copies of 10^n summed left to right, minus n * 10^n. Zero while the
//! partial sums stay exact; past that the residual grows with the ulp.

use procscope::emul::{Emulator, FpConfig};
use procscope::fpcore::{Arith, Native64};
use procscope::probes::numeric::probe_sum_residual;
use procscope::probes::SUM_RESIDUAL_NS;

fn main() {
    let b32 = Emulator::new(FpConfig::BINARY32);
    let wide = Emulator::new(FpConfig::SIG64);
    println!("{:>4} {:>14} {:>14} {:>14}", "n", "native64", "binary32", "sig64exp15");
    for n in SUM_RESIDUAL_NS {
        let cell =
            |r: Result<f64, _>| r.map_or_else(|e: procscope::probes::ProbeError| e.to_string(), |x| format!("{x:e}"));
        println!(
            "{n:>4} {:>14} {:>14} {:>14}",
            cell(probe_sum_residual(&Native64, n)),
            cell(probe_sum_residual(&b32, n).map(|v| b32.to_f64(v))),
            cell(probe_sum_residual(&wide, n).map(|v| wide.to_f64(v))),
        );
    }
}
