//! The same message hashed under different arithmetic gives unrelated
//! digests.

use procscope::emul::FpConfig;
use procscope::fphash::{fp_hash, measure_avalanche, measure_divergence, FpHashParams};
use procscope::probes::Backend;

fn main() {
    let msg = b"floating point is not associative";
    let backends = [
        Backend::Native64,
        Backend::Emulated(FpConfig::BINARY32),
        Backend::Emulated(FpConfig::SIG64),
        Backend::Emulated("binary64-tz".parse().unwrap()),
    ];
    for b in &backends {
        println!("{:<18} {}", b.label(), fp_hash(msg, &FpHashParams::new(*b)).unwrap());
    }
    let a = FpHashParams::new(Backend::Native32);
    let b = FpHashParams::new(Backend::Native64);
    println!("binary32 vs binary64: {}", measure_divergence(&a, &b, 200).unwrap());
    println!("avalanche:            {}", measure_avalanche(&b, 200).unwrap());
}
