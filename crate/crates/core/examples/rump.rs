//! Rump's polynomial: every floating-point format gets it wrong, exact
//! rational evaluation gives 1783.

use std::collections::BTreeMap;

use procscope::emul::{Emulator, FpConfig};
use procscope::fpcore::exact::{eval_exact, parse_decimal};
use procscope::fpcore::{Arith, Native32, Native64};
use procscope::probes::numeric::{probe_rump_f, probe_rump_p, rump_f_expr, RUMP_X, RUMP_Y};

fn show<A: Arith>(name: &str, a: &A) {
    let f = probe_rump_f(a);
    let (p_root, p_near) = probe_rump_p(a);
    println!(
        "{name:<14} F={:<12e} P(sqrt 0.5)={:<12e} P(0.707)={:e}",
        a.to_f64(f),
        a.to_f64(p_root),
        a.to_f64(p_near)
    );
}

fn main() {
    show("native64", &Native64);
    show("native32", &Native32);
    for cfg in ["binary64-fma", "sig64exp15-ne", "sig64exp15-tz"] {
        show(cfg, &Emulator::new(cfg.parse::<FpConfig>().unwrap()));
    }
    let inputs = BTreeMap::from([
        ("X".to_string(), parse_decimal(RUMP_X).unwrap()),
        ("Y".to_string(), parse_decimal(RUMP_Y).unwrap()),
    ]);
    println!("exact          F={}", eval_exact(&rump_f_expr(), &inputs).unwrap());
}
