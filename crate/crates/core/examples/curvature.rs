//! Sectional curvature table of the Bures-Wasserstein space at `N(0, Σ)`.
//!
//! `cargo run --example curvature -- 0.1,1,10`

use silver_rgd::certify::curvature_table;

fn main() -> silver_rgd::Result<()> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "0.001,0.001,0.001".into());
    let mut lambdas: Vec<f64> = arg.split(',').filter_map(|s| s.trim().parse().ok()).collect();
    lambdas.sort_by(f64::total_cmp);
    let table = curvature_table(&lambdas)?;
    for (pair, k) in &table {
        println!("{pair:18} {k:.6e}");
    }
    let max = table.iter().map(|(_, k)| *k).fold(0.0, f64::max);
    println!("{} planes, max curvature {max:.3e}", table.len());
    Ok(())
}
