//! Runs the invariant suite with a smaller random battery.

use pharmonic::selftest::{run_selftest, SelftestOptions};

fn main() {
    let report = run_selftest(&SelftestOptions { graphs: 6, ..Default::default() });
    for c in &report.checks {
        println!("{} {:<26} {:.2e} <= {:.0e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.worst, c.bound);
    }
}
