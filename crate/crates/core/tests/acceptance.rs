use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use thetanull::verify::{run_criterion, CRITERIA, DEFAULT_SEED};

/// Wall-clock budget per criterion.
fn budget(id: u8) -> Duration {
    Duration::from_secs(match id {
        1 | 6 => 1,
        2 => 10,
        7 => 30,
        3 | 4 | 8 => 60,
        _ => 300,
    })
}

fn end_to_end() -> Result<String, String> {
    let bin = env!("CARGO_BIN_EXE_thetanull");
    let run = || {
        Command::new(bin)
            .args(["verify-all", "--seed", &DEFAULT_SEED.to_string()])
            .output()
            .map_err(|e| format!("cannot run {bin}: {e}"))
    };
    let first = run()?;
    let second = run()?;
    if !first.status.success() {
        return Err(format!("verify-all exited with {:?}", first.status.code()));
    }
    if first.stdout != second.stdout {
        return Err("reports differ between runs".into());
    }
    Ok(format!("exit 0, {} identical report bytes", first.stdout.len()))
}

fn main() -> ExitCode {
    let mut failures = 0;
    for (id, title) in CRITERIA {
        let start = Instant::now();
        let outcome = run_criterion(id, DEFAULT_SEED).expect("listed criterion");
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget(id);
        let pass = outcome.pass && in_time;
        failures += !pass as usize;
        let summary = outcome.details.last().cloned().unwrap_or_default();
        println!(
            "{} criterion {id}: {title} ({:.2}s{}) {summary}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" },
        );
        if !outcome.pass {
            for d in outcome.details.iter().filter(|d| d.starts_with("FAILED")) {
                println!("    {d}");
            }
        }
    }
    let start = Instant::now();
    match end_to_end() {
        Ok(msg) => println!("PASS criterion 10: end-to-end verify-all ({:.2}s) {msg}", start.elapsed().as_secs_f64()),
        Err(msg) => {
            failures += 1;
            println!("FAIL criterion 10: end-to-end verify-all {msg}");
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
