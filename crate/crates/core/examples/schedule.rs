//! Prints silver schedules for small levels, the rate constants `r_k`, and a
//! restart plan.

use silver_rgd::schedules::{rate_r, restart_plan, silver_schedule, silver_step_label};

fn main() -> silver_rgd::Result<()> {
    for k in 1..=4 {
        let s = silver_schedule(k)?;
        let labels: Vec<String> = (0..s.len() as u64).map(silver_step_label).collect();
        println!("k={k} r_k={:.8} [{}]", rate_r(k), labels.join(", "));
    }
    for kappa in [10.0, 1e3, 1e7] {
        let plan = restart_plan(kappa, 4)?;
        println!("kappa={kappa:e}: k*={} block={} total={}", plan.k_star, plan.inner_iters, plan.total);
    }
    Ok(())
}
