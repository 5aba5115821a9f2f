//! Run the builtin verification suites programmatically and print a summary
//! (the CLI `schlafli-lab all` emits the same rows as JSON or CSV).
//!
//! Run: cargo run -p schlafli-lab --example verification_suites

use schlafli_lab::harness::{run_suite, Config, SUITE_NAMES};

fn main() {
    println!("=== Verification suites ===\n");
    let config = Config::default();
    println!(
        "config: fd_step = {:.0e}, quad_tol = {:.0e}, seed = {}\n",
        config.fd_step, config.quad_tol, config.seed
    );

    let mut all_pass = true;
    for name in SUITE_NAMES.iter().filter(|n| **n != "all") {
        let report = run_suite(name, &config).unwrap();
        let worst = report
            .rows
            .iter()
            .map(|r| r.residual / r.tolerance.max(1e-300))
            .fold(0.0f64, f64::max);
        println!(
            "{name:<16} {:>3} rows  {}  worst residual/tolerance = {worst:.2e}  ({:.2}s)",
            report.rows.len(),
            if report.pass() { "PASS" } else { "FAIL" },
            report.wall_time_s
        );
        for id in report.failing_ids() {
            println!("    FAIL {id}");
        }
        all_pass &= report.pass();
    }
    println!("\noverall: {}", if all_pass { "PASS" } else { "FAIL" });
}
