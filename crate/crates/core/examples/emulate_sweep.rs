//! Build a synthetic signature database from emulated formats and show how
//! far apart their fingerprints are.

use procscope::emul::FpConfig;
use procscope::fingerprint::{diff, synthetic_entry, Fingerprint, SignatureDb};
use procscope::probes::{run_battery, Backend, BatteryOptions};

fn main() {
    let cfgs: Vec<FpConfig> = [
        "binary32",
        "binary64",
        "binary64-fma",
        "binary64-tz",
        "sig64exp15-ne",
        "sig11exp5-ne",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect();
    let fps: Vec<Fingerprint> = cfgs
        .iter()
        .map(|c| {
            let b = Backend::Emulated(*c);
            Fingerprint::assemble(&b, run_battery(&b, &BatteryOptions::deterministic_only())).unwrap()
        })
        .collect();
    print!("{:>16}", "");
    for c in &cfgs {
        print!(" {:>14}", c.name());
    }
    println!();
    for (i, a) in fps.iter().enumerate() {
        print!("{:>16}", cfgs[i].name());
        for b in &fps {
            print!(" {:>14}", diff(a, b).iter().filter(|r| r.differs()).count());
        }
        println!();
    }
    let db = SignatureDb::new(cfgs.iter().map(synthetic_entry).collect()).unwrap();
    println!(
        "\n{} rows, {} bytes serialized",
        db.entries().len(),
        db.serialize().len()
    );
}
