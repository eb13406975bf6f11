use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use silver_rgd::certify::{curvature_table, format_reports, run_suite_for, SuiteTarget};
use silver_rgd::experiment::{run_experiment, ExperimentConfig};
use silver_rgd::schedules::{silver_prefix, silver_schedule, silver_step_label};
use silver_rgd::Error;

#[derive(Parser)]
#[command(name = "silver-rgd", version, about = "Silver step-size Riemannian gradient descent")]
struct Cli {
    /// Seed for `verify`; replaces the config seed list for `run`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides `output_dir` in configs).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit an SVG chart alongside the CSV files.
    #[arg(long, global = true)]
    plot: bool,
    /// Report certificate failures without a nonzero exit.
    #[arg(long, global = true)]
    informative: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ManifoldArg {
    Bw,
    Sphere,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Quadratic,
    Rayleigh,
}

#[derive(Subcommand)]
enum Command {
    /// Print the silver step sizes.
    Schedule {
        /// Level: prints the 2^k − 1 steps of the k-th schedule.
        #[arg(long, conflicts_with = "n")]
        k: Option<u32>,
        /// Prints the first n steps of the infinite schedule.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "L", default_value_t = 1.0)]
        l: f64,
        #[arg(long)]
        closed_form: bool,
    },
    /// Run an experiment config.
    Run { config: PathBuf },
    /// Run certificate suites (comma separated, or `all`).
    Verify {
        suites: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, value_enum)]
        manifold: Option<ManifoldArg>,
        #[arg(long, value_enum)]
        objective: Option<ObjectiveArg>,
    },
    /// Print the nonzero Bures-Wasserstein sectional curvatures for a spectrum.
    Curvature {
        /// Comma-separated eigenvalues.
        eigenvalues: String,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn schedule(k: Option<u32>, n: Option<usize>, l: f64, closed_form: bool) -> ExitCode {
    if !(l.is_finite() && l > 0.0) {
        return fail(1, format!("L must be positive, got {l}"));
    }
    let s = match (k, n) {
        (_, Some(n)) => silver_prefix(n),
        (k, None) => match silver_schedule(k.unwrap_or(3)) {
            Ok(s) => s,
            Err(e) => return fail(1, e),
        },
    };
    for (i, eta) in s.entries.iter().enumerate() {
        if closed_form {
            println!("{i} {eta} {} {}", eta / l, silver_step_label(i as u64));
        } else {
            println!("{i} {eta} {}", eta / l);
        }
    }
    ExitCode::SUCCESS
}

fn run(cli: &Cli, path: &Path) -> ExitCode {
    let mut cfg = match ExperimentConfig::from_file(path) {
        Ok(c) => c,
        Err(e @ Error::Config { .. }) => return fail(1, format!("{}: {e}", path.display())),
        Err(e) => return fail(1, e),
    };
    if let Some(s) = cli.seed {
        cfg.seeds = vec![s];
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    cfg.plot |= cli.plot;
    let res = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(1, e),
    };
    match res.write(&cfg.output_dir) {
        Ok(paths) => paths.iter().for_each(|p| println!("wrote {}", p.display())),
        Err(e) => return fail(1, e),
    }
    print!("{}", res.summary_csv());
    if res.all_diverged() {
        return fail(2, "every run diverged");
    }
    ExitCode::SUCCESS
}

fn verify(
    cli: &Cli,
    suites: &str,
    samples: usize,
    manifold: Option<ManifoldArg>,
    objective: Option<ObjectiveArg>,
) -> ExitCode {
    let names: Vec<&str> = if suites == "all" {
        silver_rgd::certify::SUITES.to_vec()
    } else {
        suites.split(',').map(str::trim).collect()
    };
    let target = match (manifold, objective) {
        (Some(ManifoldArg::Sphere), _) | (_, Some(ObjectiveArg::Rayleigh)) => SuiteTarget::SphereRayleigh,
        _ => SuiteTarget::Default,
    };
    let reports = match run_suite_for(&names, target, cli.seed.unwrap_or(0), samples) {
        Ok(r) => r,
        Err(e) => return fail(1, e),
    };
    let text = format_reports(&reports);
    print!("{text}");
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let path = dir.join("verify_report.txt");
    if let Err(e) = std::fs::create_dir_all(&dir).and_then(|_| std::fs::write(&path, &text)) {
        return fail(1, e);
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    println!("{} reports, {failed} failed; report at {}", reports.len(), path.display());
    if failed > 0 && !cli.informative {
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}

fn curvature(list: &str) -> ExitCode {
    let lambdas: Result<Vec<f64>, _> = list.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let Ok(mut lambdas) = lambdas else {
        return fail(1, format!("cannot parse eigenvalues `{list}`"));
    };
    lambdas.sort_by(f64::total_cmp);
    match curvature_table(&lambdas) {
        Ok(table) => {
            for (pair, k) in table {
                println!("{pair} = {k}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(1, e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Schedule { k, n, l, closed_form } => schedule(*k, *n, *l, *closed_form),
        Command::Run { config } => run(&cli, config),
        Command::Verify {
            suites,
            samples,
            manifold,
            objective,
        } => verify(&cli, suites, *samples, *manifold, *objective),
        Command::Curvature { eigenvalues } => curvature(eigenvalues),
    }
}
