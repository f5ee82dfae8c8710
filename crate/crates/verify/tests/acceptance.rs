//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Numeric arguments restrict the run to those criteria; other arguments
//! (such as libtest flags) are ignored.

use std::process::ExitCode;

fn main() -> ExitCode {
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    let mut ran = 0;
    for c in lcdg_verify::criteria() {
        if !only.is_empty() && !only.contains(&c.id) {
            continue;
        }
        let outcome = c.run();
        println!("{}", outcome.line());
        ran += 1;
        if !outcome.passed {
            failed.push(outcome.id);
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
