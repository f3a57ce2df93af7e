//! Fingerprint this machine, serialize, parse back and rank it against the
//! built-in signature database.

use procscope::fingerprint::{match_fingerprint, shipped_db, Fingerprint};
use procscope::probes::{run_battery, Backend, BatteryOptions};

fn main() {
    let backend = Backend::Native64;
    let fp = Fingerprint::assemble(&backend, run_battery(&backend, &BatteryOptions::deterministic_only())).unwrap();
    let text = fp.serialize();
    print!("{text}");
    let back = Fingerprint::parse(&text).unwrap();
    assert!(back.canonical_eq(&fp));
    println!();
    print!("{}", match_fingerprint(&back, &shipped_db()).unwrap());
}
