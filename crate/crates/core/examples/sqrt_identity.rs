//! Does `sqrt(A)^2 == A` hold? Only for exact squares.

use procscope::emul::{Emulator, FpConfig};
use procscope::fpcore::{Arith, Native64};
use procscope::probes::numeric::probe_sqrt_identity;

fn main() {
    let e = Emulator::new(FpConfig::BINARY32);
    for a in [2.0, 3.0, 4.0, 0.1, 1e10, 2f64.powi(-30)] {
        let native = probe_sqrt_identity(&Native64, a).unwrap();
        let b32 = probe_sqrt_identity(&e, e.from_f64(a)).unwrap();
        println!("A={a:<12e} binary64 {native:<5} binary32 {b32}");
    }
}
