//! Restarted silver steps on a strongly convex Gaussian potential, against
//! the geometric decay envelope for the squared distance.

use silver_rgd::manifolds::{BuresWasserstein, Gaussian};
use silver_rgd::objectives::{random_quadratic_potential, Objective};
use silver_rgd::optimizer::{restarted_run, RunOptions};
use silver_rgd::schedules::{restart_plan, RHO};

fn main() -> silver_rgd::Result<()> {
    let (d, kappa) = (10, 10.0);
    let f = random_quadratic_potential(d, 1.0, 1.0 / kappa, 0)?;
    let m = BuresWasserstein::extended();
    let plan = restart_plan(kappa, 8)?;
    let opts = RunOptions {
        thin: Some(1),
        ..RunOptions::default()
    };
    let t = restarted_run(&m, &f, &plan, &Gaussian::standard(d), &opts)?;
    let d0 = f.dist_sq_to_optimum(&m, t.initial_point())?;
    let exponent = (RHO / 2.0).ln() / kappa.powf(2f64.ln() / RHO.ln());
    for c in 1..=plan.cycles {
        let n = c * plan.inner_iters;
        let dist = f.dist_sq_to_optimum(&m, t.point(n).expect("stored"))?;
        println!("n={n:4} d^2={dist:.3e} envelope={:.3e}", (-exponent * n as f64).exp() * d0);
    }
    Ok(())
}
