//! Runs the full verification suite over the default models and prints one
//! line per acceptance criterion.

use gxray_core::verify::{default_models, run, VerifyOptions};
use std::collections::BTreeMap;

fn main() {
    let models = default_models();
    let opts = VerifyOptions::default();
    let report = run(&models, &[], &opts);

    eprint!("{}", report.to_text());
    let mut by_criterion: BTreeMap<u8, Vec<&gxray_core::verify::CheckResult>> = BTreeMap::new();
    for r in &report.results {
        by_criterion.entry(r.criterion).or_default().push(r);
    }
    let mut failed = 0;
    for (c, rs) in &by_criterion {
        let ok = rs.iter().all(|r| r.passed);
        failed += usize::from(!ok);
        let worst: Vec<String> = rs
            .iter()
            .flat_map(|r| r.measures.iter())
            .fold(BTreeMap::<&str, (f64, f64)>::new(), |mut acc, m| {
                let e = acc.entry(&m.name).or_insert((m.value, m.tolerance));
                if m.value > e.0 {
                    *e = (m.value, m.tolerance);
                }
                acc
            })
            .into_iter()
            .map(|(n, (v, t))| format!("{n}={v:.2e}/{t:.0e}"))
            .collect();
        println!(
            "criterion {c:>2} {:<16} {} over {} model(s): {}",
            rs[0].check.name(),
            if ok { "PASS" } else { "FAIL" },
            rs.len(),
            worst.join(" ")
        );
    }
    assert_eq!(by_criterion.len(), 13, "every criterion must be exercised");
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
