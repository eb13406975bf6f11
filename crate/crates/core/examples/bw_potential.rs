//! Silver against constant steps on a Gaussian quadratic potential, with
//! the rate bound checked at every level.
//!
//! `cargo run --release --example bw_potential -- [kappa] [seed]`

use silver_rgd::manifolds::{BuresWasserstein, Gaussian};
use silver_rgd::objectives::random_quadratic_potential;
use silver_rgd::optimizer::{check_bound, rgd_run, RunOptions};
use silver_rgd::schedules::{constant_schedule, silver_schedule};

fn main() -> silver_rgd::Result<()> {
    let mut args = std::env::args().skip(1);
    let kappa: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1e3);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let (d, k) = (10, 10);
    let n = (1 << k) - 1;

    let f = random_quadratic_potential(d, 1.0, 1.0 / kappa, seed)?;
    let m = BuresWasserstein::extended();
    let x0 = Gaussian::standard(d);
    let opts = RunOptions::default();
    let silver = rgd_run(&m, &f, &silver_schedule(k)?, &x0, n, &opts)?;
    let constant = rgd_run(&m, &f, &constant_schedule(1.0, n)?, &x0, n, &opts)?;

    for level in 1..=k {
        let b = check_bound(&m, &silver, &f, level)?;
        println!("k={level:2} f-f*={:.3e} bound={:.3e} ok={}", b.achieved, b.bound, b.satisfied);
    }
    println!("final: silver {:.3e}, constant {:.3e}", silver.final_value(), constant.final_value());
    Ok(())
}
