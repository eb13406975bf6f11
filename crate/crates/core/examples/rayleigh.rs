//! Leading eigenvector by gradient descent on the sphere.
//!
//! `cargo run --release --example rayleigh -- [d] [wigner|spread]`

use silver_rgd::manifolds::{Sphere, SpherePoint};
use silver_rgd::objectives::{make_rayleigh_h, Objective, RayleighKind, RayleighQuotient};
use silver_rgd::optimizer::{rgd_run, RunOptions};
use silver_rgd::rng::ExperimentRng;
use silver_rgd::schedules::{constant_schedule, silver_prefix};

fn main() -> silver_rgd::Result<()> {
    let mut args = std::env::args().skip(1);
    let d = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let kind = match args.next().as_deref() {
        Some("spread") => RayleighKind::Spread,
        _ => RayleighKind::Wigner,
    };
    let n = 1000;
    let f = RayleighQuotient::new(make_rayleigh_h(d, kind, 7)?)?;
    let f_star = f.optimal_value().unwrap_or(0.0);
    let x0 = SpherePoint::new(ExperimentRng::new(1).unit_vector(d))?;
    let l = f.smoothness();

    let opts = RunOptions::default();
    for (name, s) in [("silver", silver_prefix(n)), ("constant", constant_schedule(1.0, n)?)] {
        let t = rgd_run(&Sphere, &f, &s.with_smoothness(l)?, &x0, n, &opts)?;
        let errs: Vec<String> = [0, 10, 100, n].iter().map(|&i| format!("{:.2e}", t.values[i] - f_star)).collect();
        println!("{name:8} {} dist^2={:.2e}", errs.join(" "), f.dist_sq_to_optimum(&Sphere, &t.final_point)?);
    }
    Ok(())
}
