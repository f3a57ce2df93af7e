//! Built-in signature rows: published per-processor results and synthetic
//! rows generated by the emulator.

use super::db::{DbEntry, Expectation, Provenance, SignatureDb};
use super::Fingerprint;
use crate::emul::FpConfig;
use crate::probes::{run_battery, Backend, BatteryOptions, Payload, PayloadKind};

/// The database shipped with the crate.
pub const SHIPPED_DB: &str = include_str!("../../data/signatures.db");

/// Configurations with synthetic rows in the shipped database.
pub const SHIPPED_SYNTHETIC: [FpConfig; 3] = [FpConfig::BINARY32, FpConfig::BINARY64, FpConfig::SIG64];

fn exp(kind: PayloadKind, token: &str) -> Expectation {
    Expectation::parse(kind, token).expect("static expectation")
}

struct Row<'a> {
    class: &'a str,
    easy: &'a str,
    /// sin(10^k * pi1) for k = 10, 17, 37, as truncated decimals.
    sines: Option<[&'a str; 3]>,
    /// Trailing hex of sin(10^37 * pi_i), i = 1..4.
    hex37: Option<[&'a str; 4]>,
}

// Transcribed as printed, including the positive k=37 value on the AMD 64
// row and the dsPIC33 cells that come from a 16/32-bit toolchain.
const ROWS: [Row<'static>; 8] = [
    Row {
        class: "VAX-750",
        easy: "true,true,false,false",
        sines: None,
        hex37: None,
    },
    Row {
        class: "AMD-32",
        easy: "false,true,false,false",
        sines: Some(["0.375", "0.424", "-0.837"]),
        hex37: None,
    },
    Row {
        class: "AMD-64",
        easy: "false,true,false,false",
        sines: Some(["0.375", "0.424", "0.837"]),
        hex37: Some(["af545000"; 4]),
    },
    Row {
        class: "ATOM",
        easy: "false,true,false,false",
        sines: Some(["0.375", "0.423", "-0.832"]),
        hex37: Some(["47257756", "9d94ef4d", "99f9067", "99f9067"]),
    },
    Row {
        class: "INTEL-DC",
        easy: "false,true,false,false",
        sines: Some(["0.375", "0.423", "-0.832"]),
        hex37: Some(["47257756", "9d94ef4d", "99f9067", "99f9067"]),
    },
    Row {
        class: "MIPS-12000",
        easy: "false,true,false,false",
        sines: Some(["0.375", "0.423", "-0.832"]),
        hex37: Some(["47257756", "9d94ef4d", "99f9067", "99f9067"]),
    },
    Row {
        class: "dsPIC33",
        easy: "false,true,true,false",
        sines: Some(["0.81", "0.62", "-0.44"]),
        hex37: Some(["bee5"; 4]),
    },
    Row {
        class: "IPHONE-3G",
        easy: "false,true,false,false",
        sines: Some(["0.375", "0.423", "-0.837"]),
        hex37: Some(["47257756", "9d94ef4d", "99f9067", "99f9067"]),
    },
];

/// Rows transcribed from published per-processor tables.
pub fn published_rows() -> Vec<DbEntry> {
    ROWS.iter()
        .map(|r| {
            let mut e = DbEntry::new(r.class, Provenance::PaperTable)
                .expect("easy-computations", exp(PayloadKind::Bools, r.easy));
            if let Some(s) = r.sines {
                for (k, v) in [10, 17, 37].iter().zip(s) {
                    e = e.expect(&format!("sin-k{k}-pi1"), exp(PayloadKind::Bits, &format!("dec:{v}")));
                }
            }
            if let Some(h) = r.hex37 {
                for (i, v) in h.iter().enumerate() {
                    e = e.expect(
                        &format!("sin-k37-pi{}", i + 1),
                        exp(PayloadKind::Bits, &format!("lo:{v}")),
                    );
                }
            }
            e
        })
        .collect()
}

pub fn synthetic_class_name(cfg: &FpConfig) -> String {
    format!("{}-synthetic", cfg.name().to_uppercase())
}

/// Exact-match row built from the emulated battery under `cfg`.
pub fn synthetic_entry(cfg: &FpConfig) -> DbEntry {
    let backend = Backend::Emulated(*cfg);
    let fp = Fingerprint::assemble(&backend, run_battery(&backend, &BatteryOptions::deterministic_only()))
        .expect("battery output is complete");
    from_fingerprint(&fp, synthetic_class_name(cfg), Provenance::SyntheticEmulated)
}

/// Exact-match row from any fingerprint. Error payloads become wildcards.
pub fn from_fingerprint(fp: &Fingerprint, class: String, provenance: Provenance) -> DbEntry {
    fp.canonical_results().fold(DbEntry::new(class, provenance), |e, r| {
        let x = match &r.payload {
            Payload::Error(_) => Expectation::Any,
            p => Expectation::Exact(p.clone()),
        };
        e.expect(&r.probe_id, x)
    })
}

/// Published rows plus synthetic rows for the standard presets.
pub fn shipped_db() -> SignatureDb {
    let mut entries = published_rows();
    entries.extend(SHIPPED_SYNTHETIC.iter().map(synthetic_entry));
    SignatureDb::new(entries).expect("built-in rows are valid")
}

pub fn shipped_db_text() -> String {
    shipped_db().serialize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingerprint::match_fingerprint;

    #[test]
    fn published_rows_are_valid() {
        let db = SignatureDb::new(published_rows()).unwrap();
        assert_eq!(db.entries().len(), 8);
        assert!(db.entries().iter().all(|e| e.provenance == Provenance::PaperTable));
    }

    #[test]
    fn native_host_never_looks_like_dspic() {
        let fp = Fingerprint::assemble(
            &Backend::Native64,
            run_battery(&Backend::Native64, &BatteryOptions::deterministic_only()),
        )
        .unwrap();
        let db = SignatureDb::new(published_rows()).unwrap();
        let r = match_fingerprint(&fp, &db).unwrap();
        let top = r.ranked[0].score;
        let leaders: Vec<&str> = r
            .ranked
            .iter()
            .filter(|c| c.score == top)
            .map(|c| c.class.as_str())
            .collect();
        assert!(!leaders.contains(&"dsPIC33"));
        for l in leaders {
            assert!(["AMD-64", "INTEL-DC", "ATOM", "MIPS-12000"].contains(&l), "{l}");
        }
    }

    #[test]
    fn shipped_file_is_current() {
        assert!(
            SHIPPED_DB == shipped_db_text(),
            "stale data/signatures.db; regenerate with `procscope emulate-sweep --with-published-rows`"
        );
    }
}
