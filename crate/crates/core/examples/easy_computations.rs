//! Four tiny comparisons whose answers depend on rounding and precision.

use procscope::emul::{Emulator, FpConfig};
use procscope::fpcore::{Native32, Native64};
use procscope::probes::numeric::probe_easy_computations;

fn main() {
    println!("native64  {:?}", probe_easy_computations(&Native64));
    println!("native32  {:?}", probe_easy_computations(&Native32));
    for cfg in ["binary64", "binary64-tz", "sig64exp15-ne", "sig11exp5-ne"] {
        let e = Emulator::new(cfg.parse::<FpConfig>().unwrap());
        println!("{cfg:<9} {:?}", probe_easy_computations(&e));
    }
}
