//! Gate a code path on the arithmetic it runs under.

use procscope::fingerprint::{matches_target, Fingerprint};
use procscope::probes::{run_battery, Backend, BatteryOptions};

fn main() {
    let gates = [
        "gentleman.mantissa_bits == 53 && gentleman.base == 2",
        "easy-computations.2 == true",
        "sin-k37-pi1 == lo:47257756 || !(sqrt-identity == false)",
        "",
    ];
    for backend in ["native64", "binary32", "sig64exp15-ne"] {
        let b: Backend = backend.parse().unwrap();
        let fp = Fingerprint::assemble(&b, run_battery(&b, &BatteryOptions::deterministic_only())).unwrap();
        for g in gates {
            println!("{backend:<14} {g:<58} {}", matches_target(&fp, g).unwrap());
        }
    }
}
