//! Runs an inline experiment config and prints the summary CSV.

use silver_rgd::experiment::{run_experiment, ExperimentConfig};

const CONFIG: &str = "
experiment = custom
dimension = 20
alpha = 1e-2
iterations = 1023
seeds = 0..8
arm = silver
arm = constant(1)
arm = restart(auto)
";

fn main() -> silver_rgd::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG)?;
    let res = run_experiment(&cfg)?;
    print!("{}", res.summary_csv());
    Ok(())
}
