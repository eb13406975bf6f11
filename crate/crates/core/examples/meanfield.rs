//! Trains a mean-field two-layer network on `sin(2πx)` with silver and
//! constant steps, reporting train and test MSE.

use silver_rgd::manifolds::Euclidean;
use silver_rgd::objectives::{make_meanfield_data, MeanFieldNet, MeanFieldTarget};
use silver_rgd::optimizer::{rgd_run, RunOptions};
use silver_rgd::rng::ExperimentRng;
use silver_rgd::schedules::{constant_schedule, silver_prefix};

fn main() -> silver_rgd::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let n = 2000;
    let (train, test) = make_meanfield_data(MeanFieldTarget::Sine, 200, seed);
    let net = MeanFieldNet::new(100, train, 100.0)?;
    let theta0 = net.init(&mut ExperimentRng::with_stream(seed, 3));

    for (name, s) in [("silver", silver_prefix(n)), ("constant", constant_schedule(1.0, n)?)] {
        let t = rgd_run(&Euclidean, &net, &s.with_smoothness(100.0)?, &theta0, n, &RunOptions::default())?;
        println!(
            "{name:8} train {:.4} -> {:.4}, test {:.4}, {}",
            t.values[0],
            t.final_value(),
            net.mse(&t.final_point, &test)?,
            t.status.label()
        );
    }
    Ok(())
}
