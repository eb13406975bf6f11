//! Runs every certificate battery and prints the report table.
//!
//! `cargo run --release --example certificates -- [seed] [samples]`

use std::time::Instant;

use silver_rgd::certify::{format_reports, run_suite, SUITES};

fn main() -> silver_rgd::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let samples = args.next().and_then(|s| s.parse().ok()).unwrap_or(1000);

    let start = Instant::now();
    let names: Vec<String> = match args.next() { Some(s) => s.split(',').map(String::from).collect(), None => SUITES.iter().map(|s| s.to_string()).collect() };
    let reports = run_suite(&names, seed, samples)?;
    print!("{}", format_reports(&reports));
    let failed = reports.iter().filter(|r| !r.pass).count();
    println!("{} reports, {failed} failed, {:.1?}", reports.len(), start.elapsed());
    Ok(())
}
