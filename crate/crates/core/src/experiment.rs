//! Config-driven experiment runner: parses a flat `key = value` file, runs
//! every (seed, arm) pair, and emits row and summary CSV plus an optional
//! log-scale SVG chart.
//!
//! ```text
//! experiment = bw_potential
//! dimension = 10
//! kappa = 1000
//! iterations = 1023
//! seeds = 0..20
//! arm = silver
//! arm = constant(1)
//! arm = restart(auto)
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::manifolds::{BuresWasserstein, Euclidean, Gaussian, Manifold, Sphere, SpherePoint};
use crate::objectives::{
    make_meanfield_data, make_rayleigh_h, random_quadratic_potential, sigma_star_spectrum, EuclideanQuadratic,
    MeanFieldNet, MeanFieldTarget, Objective, RayleighKind, RayleighQuotient,
};
use crate::optimizer::{restarted_run, rgd_run, RunOptions, Status, Trajectory};
use crate::rng::ExperimentRng;
use crate::schedules::{constant_schedule, restart_plan, silver_prefix, MAX_LEVEL};

pub const ROWS_HEADER: &str = "seed,arm,iteration,step_size,objective_value,error,grad_norm_sq,dist_sq_to_ref,status";
pub const SUMMARY_HEADER: &str = "arm,runs,completed,final_error_mean,final_error_p2_5,final_error_p97_5";

/// Budget used by `restart(auto)`: whole cycles are rounded up to a power of
/// two covering this many iterations.
const AUTO_RESTART_BUDGET: usize = (1 << 10) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    BwPotential,
    Rayleigh,
    MeanField,
    /// Euclidean quadratic with a log-spaced spectrum on `[α, L]`.
    Custom,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::BwPotential => "bw_potential",
            ExperimentKind::Rayleigh => "rayleigh",
            ExperimentKind::MeanField => "meanfield",
            ExperimentKind::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RestartCycles {
    /// `ℓ = 2^⌈log₂(1023 / m)⌉`.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arm {
    Silver,
    Constant(f64),
    Restart(RestartCycles),
}

impl Arm {
    pub fn label(&self) -> String {
        match self {
            Arm::Silver => "silver".into(),
            Arm::Constant(eta) => format!("constant({eta})"),
            Arm::Restart(RestartCycles::Auto) => "restart(auto)".into(),
            Arm::Restart(RestartCycles::Fixed(l)) => format!("restart({l})"),
        }
    }

    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "silver" {
            return Ok(Arm::Silver);
        }
        let inner = |prefix: &str| {
            s.strip_prefix(prefix)
                .and_then(|r| r.strip_prefix('('))
                .and_then(|r| r.strip_suffix(')'))
                .map(str::trim)
        };
        if let Some(v) = inner("constant") {
            let eta: f64 = v.parse().map_err(|_| format!("bad step `{v}`"))?;
            if !(eta.is_finite() && eta > 0.0) {
                return Err(format!("constant step must be positive, got {v}"));
            }
            return Ok(Arm::Constant(eta));
        }
        if let Some(v) = inner("restart") {
            if v == "auto" {
                return Ok(Arm::Restart(RestartCycles::Auto));
            }
            let l: usize = v.parse().map_err(|_| format!("bad cycle count `{v}`"))?;
            if l == 0 {
                return Err("restart cycles must be positive".into());
            }
            return Ok(Arm::Restart(RestartCycles::Fixed(l)));
        }
        Err(format!("unknown arm `{s}`; expected silver, constant(eta) or restart(auto|l)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub experiment: ExperimentKind,
    pub dimension: usize,
    pub kappa: Option<f64>,
    pub alpha: Option<f64>,
    pub smoothness: Option<f64>,
    pub iterations: usize,
    pub seeds: Vec<u64>,
    /// Fixes the problem instance across seeds; otherwise each seed draws its own.
    pub problem_seed: Option<u64>,
    pub arms: Vec<Arm>,
    pub output_dir: PathBuf,
    pub thin: usize,
    pub plot: bool,
    /// Allow rank-deficient covariances (BW only).
    pub extended_covariance: bool,
    pub rayleigh_kind: RayleighKind,
    pub target: MeanFieldTarget,
    pub width: usize,
    pub samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: String::new(),
            experiment: ExperimentKind::BwPotential,
            dimension: 10,
            kappa: None,
            alpha: None,
            smoothness: None,
            iterations: 1023,
            seeds: vec![0],
            problem_seed: None,
            arms: Vec::new(),
            output_dir: PathBuf::from("out"),
            thin: 1,
            plot: false,
            extended_covariance: true,
            rayleigh_kind: RayleighKind::Wigner,
            target: MeanFieldTarget::Sine,
            width: 100,
            samples: 200,
        }
    }
}

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| config_err(line, format!("`{key}`: cannot parse `{v}`")))
}

fn parse_seeds(line: usize, v: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = v.split_once("..") {
        let (a, b): (u64, u64) = (parse_num(line, "seeds", a.trim())?, parse_num(line, "seeds", b.trim())?);
        return Ok((a..b).collect());
    }
    v.split(',').map(|s| parse_num(line, "seeds", s.trim())).collect()
}

impl ExperimentConfig {
    /// Parses and validates. Blank lines and `#` comments are ignored;
    /// `arm` may repeat, every other key may appear once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = BTreeMap::new();
        let mut saw_experiment = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| config_err(line, format!("expected `key = value`, got `{content}`")))?;
            if key != "arm" {
                if let Some(prev) = seen.insert(key.to_string(), line) {
                    return Err(config_err(line, format!("`{key}` already set on line {prev}")));
                }
            }
            match key {
                "name" => cfg.name = value.to_string(),
                "experiment" => {
                    saw_experiment = true;
                    cfg.experiment = match value {
                        "bw_potential" => ExperimentKind::BwPotential,
                        "rayleigh" => ExperimentKind::Rayleigh,
                        "meanfield" => ExperimentKind::MeanField,
                        "custom" => ExperimentKind::Custom,
                        _ => return Err(config_err(line, format!("unknown experiment `{value}`"))),
                    }
                }
                "dimension" => cfg.dimension = parse_num(line, key, value)?,
                "kappa" => cfg.kappa = Some(parse_num(line, key, value)?),
                "alpha" => cfg.alpha = Some(parse_num(line, key, value)?),
                "L" => cfg.smoothness = Some(parse_num(line, key, value)?),
                "iterations" => cfg.iterations = parse_num(line, key, value)?,
                "seeds" => cfg.seeds = parse_seeds(line, value)?,
                "problem_seed" => cfg.problem_seed = Some(parse_num(line, key, value)?),
                "arm" => cfg.arms.push(Arm::parse(value).map_err(|m| config_err(line, m))?),
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "thin" => cfg.thin = parse_num(line, key, value)?,
                "plot" => cfg.plot = parse_num(line, key, value)?,
                "covariance" => {
                    cfg.extended_covariance = match value {
                        "extended" => true,
                        "strict" => false,
                        _ => return Err(config_err(line, "`covariance` must be extended or strict")),
                    }
                }
                "kind" => {
                    cfg.rayleigh_kind = match value {
                        "wigner" => RayleighKind::Wigner,
                        "spread" => RayleighKind::Spread,
                        _ => return Err(config_err(line, "`kind` must be wigner or spread")),
                    }
                }
                "target" => {
                    cfg.target = match value {
                        "sine" => MeanFieldTarget::Sine,
                        "teacher" => MeanFieldTarget::Teacher,
                        _ => return Err(config_err(line, "`target` must be sine or teacher")),
                    }
                }
                "width" => cfg.width = parse_num(line, key, value)?,
                "samples" => cfg.samples = parse_num(line, key, value)?,
                _ => return Err(config_err(line, format!("unknown key `{key}`"))),
            }
        }
        if !saw_experiment {
            return Err(config_err(0, "missing `experiment`"));
        }
        if cfg.name.is_empty() {
            cfg.name = cfg.experiment.label().to_string();
        }
        if cfg.arms.is_empty() {
            cfg.arms.push(Arm::Silver);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(config_err(0, m));
        if self.iterations == 0 {
            return bad("`iterations` must be at least 1".into());
        }
        if self.seeds.is_empty() {
            return bad("`seeds` must not be empty".into());
        }
        if self.thin == 0 {
            return bad("`thin` must be at least 1".into());
        }
        if self.dimension == 0 {
            return bad("`dimension` must be at least 1".into());
        }
        if self.experiment == ExperimentKind::Rayleigh && self.dimension < 2 {
            return bad("rayleigh needs `dimension` >= 2".into());
        }
        if self.experiment == ExperimentKind::MeanField && (self.width == 0 || self.samples < 2) {
            return bad("meanfield needs `width` >= 1 and `samples` >= 2".into());
        }
        if let Some(l) = self.smoothness {
            if !(l.is_finite() && l > 0.0) {
                return bad(format!("`L` must be positive, got {l}"));
            }
        }
        if self.kappa.is_some() && self.alpha.is_some() {
            return bad("set `kappa` or `alpha`, not both".into());
        }
        if let Some(k) = self.kappa {
            if !(k.is_finite() && k >= 1.0) {
                return bad(format!("`kappa` must be >= 1, got {k}"));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a <= self.l()) {
                return bad(format!("`alpha` must lie in (0, L], got {a}"));
            }
        }
        let restarts = self.arms.iter().any(|a| matches!(a, Arm::Restart(_)));
        if restarts {
            if matches!(self.experiment, ExperimentKind::Rayleigh | ExperimentKind::MeanField) {
                return bad("restart arms need a strongly convex experiment".into());
            }
            if !(self.condition_number() > 1.0) {
                return bad("restart arms need a condition number above 1".into());
            }
        }
        Ok(())
    }

    fn l(&self) -> f64 {
        self.smoothness.unwrap_or(match self.experiment {
            ExperimentKind::MeanField => 100.0,
            _ => 1.0,
        })
    }

    fn condition_number(&self) -> f64 {
        match (self.kappa, self.alpha) {
            (Some(k), _) => k,
            (None, Some(a)) => self.l() / a,
            (None, None) => 10.0,
        }
    }

    fn alpha_value(&self) -> f64 {
        self.l() / self.condition_number()
    }
}

/// One row of the per-iteration CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub arm: String,
    pub iteration: usize,
    /// `η_i / L` applied from this iterate; absent after the last one.
    pub step_size: Option<f64>,
    pub objective_value: f64,
    pub error: f64,
    pub grad_norm_sq: f64,
    pub dist_sq_to_ref: Option<f64>,
    pub status: String,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn csv_string(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let write = || -> csv::Result<()> {
        w.write_record(header.split(','))?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
        Ok(())
    };
    write().expect("writing to memory");
    String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8 fields")
}

impl RunRecord {
    fn fields(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            self.arm.clone(),
            self.iteration.to_string(),
            opt(self.step_size),
            format!("{:e}", self.objective_value),
            format!("{:e}", self.error),
            format!("{:e}", self.grad_norm_sq),
            opt(self.dist_sq_to_ref),
            self.status.clone(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub seed: u64,
    pub arm: String,
    pub status: Status,
    pub records: Vec<RunRecord>,
    /// `f(x_i) − f*` at every iteration, thinned or not.
    pub errors: Vec<f64>,
}

impl RunResult {
    pub fn final_error(&self) -> f64 {
        self.errors.last().copied().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmSummary {
    pub arm: String,
    pub runs: usize,
    pub completed: usize,
    pub mean: f64,
    pub p2_5: f64,
    pub p97_5: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Ordered by seed, then by arm as listed in the config.
    pub runs: Vec<RunResult>,
}

/// Linear-interpolation percentile of sorted data, `p ∈ [0, 1]`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = p.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

fn summarize(arms: &[String], finals: &[(String, f64, bool)]) -> Vec<ArmSummary> {
    arms.iter()
        .map(|arm| {
            let mut vals: Vec<f64> = finals.iter().filter(|(a, _, _)| a == arm).map(|(_, v, _)| *v).collect();
            let completed = finals.iter().filter(|(a, _, c)| a == arm && *c).count();
            vals.sort_by(f64::total_cmp);
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            ArmSummary {
                arm: arm.clone(),
                runs: vals.len(),
                completed,
                mean,
                p2_5: percentile(&vals, 0.025),
                p97_5: percentile(&vals, 0.975),
            }
        })
        .collect()
}

fn summary_to_csv(summary: &[ArmSummary]) -> String {
    let rows = summary.iter().map(|s| {
        vec![
            s.arm.clone(),
            s.runs.to_string(),
            s.completed.to_string(),
            format!("{:e}", s.mean),
            format!("{:e}", s.p2_5),
            format!("{:e}", s.p97_5),
        ]
    });
    csv_string(SUMMARY_HEADER, rows)
}

/// Recomputes the summary CSV from a rows CSV, using the last row of each
/// (seed, arm) run.
pub fn summary_from_rows_csv(rows: &str) -> Result<String> {
    let mut reader = csv::Reader::from_reader(rows.as_bytes());
    if reader.headers().map_err(csv_err)?.iter().collect::<Vec<_>>().join(",") != ROWS_HEADER {
        return Err(config_err(1, "rows CSV header mismatch"));
    }
    let mut last: Vec<((u64, String), (f64, bool))> = Vec::new();
    let mut arms: Vec<String> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 9 {
            return Err(config_err(i + 2, "expected 9 columns"));
        }
        let seed: u64 = parse_num(i + 2, "seed", &rec[0])?;
        let arm = rec[1].to_string();
        let err: f64 = parse_num(i + 2, "error", &rec[5])?;
        let completed = &rec[8] == Status::Completed.label();
        if !arms.contains(&arm) {
            arms.push(arm.clone());
        }
        match last.iter_mut().find(|(k, _)| k.0 == seed && k.1 == arm) {
            Some(entry) => entry.1 = (err, completed),
            None => last.push(((seed, arm), (err, completed))),
        }
    }
    let finals: Vec<(String, f64, bool)> = last.into_iter().map(|((_, a), (e, c))| (a, e, c)).collect();
    Ok(summary_to_csv(&summarize(&arms, &finals)))
}

impl ExperimentResult {
    pub fn rows_csv(&self) -> String {
        csv_string(ROWS_HEADER, self.runs.iter().flat_map(|r| r.records.iter().map(RunRecord::fields)))
    }

    pub fn summary(&self) -> Vec<ArmSummary> {
        let arms: Vec<String> = self.config.arms.iter().map(Arm::label).collect();
        let finals: Vec<(String, f64, bool)> = self
            .runs
            .iter()
            .map(|r| (r.arm.clone(), r.records.last().map_or(f64::NAN, |x| x.error), r.status.is_completed()))
            .collect();
        summarize(&arms, &finals)
    }

    pub fn summary_csv(&self) -> String {
        summary_to_csv(&self.summary())
    }

    /// True when every run of every arm diverged.
    pub fn all_diverged(&self) -> bool {
        self.runs.iter().all(|r| matches!(r.status, Status::Diverged { .. }))
    }

    pub fn runs_for<'a>(&'a self, arm: &'a str) -> impl Iterator<Item = &'a RunResult> + 'a {
        self.runs.iter().filter(move |r| r.arm == arm)
    }

    /// Mean error per iteration for each arm, over the runs that reached it.
    pub fn mean_curves(&self) -> Vec<(String, Vec<f64>)> {
        self.config
            .arms
            .iter()
            .map(|arm| {
                let label = arm.label();
                let runs: Vec<&RunResult> = self.runs_for(&label).collect();
                let len = runs.iter().map(|r| r.errors.len()).max().unwrap_or(0);
                let curve = (0..len)
                    .map(|i| {
                        let v: Vec<f64> = runs.iter().filter_map(|r| r.errors.get(i)).copied().collect();
                        v.iter().sum::<f64>() / v.len() as f64
                    })
                    .collect();
                (label, curve)
            })
            .collect()
    }

    pub fn svg(&self) -> String {
        render_svg(&self.config.name, &self.mean_curves())
    }

    /// Writes `<name>_rows.csv`, `<name>_summary.csv` and, when plotting,
    /// `<name>.svg` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let name = &self.config.name;
        let mut written = vec![dir.join(format!("{name}_rows.csv")), dir.join(format!("{name}_summary.csv"))];
        fs::write(&written[0], self.rows_csv())?;
        fs::write(&written[1], self.summary_csv())?;
        if self.config.plot {
            let p = dir.join(format!("{name}.svg"));
            fs::write(&p, self.svg())?;
            written.push(p);
        }
        Ok(written)
    }
}

struct Prepared<'a, M: Manifold, O> {
    manifold: &'a M,
    objective: &'a O,
    x0: M::Point,
    f_star: f64,
    /// Whether distance to the reference can be reported.
    has_reference: bool,
}

fn run_arm<M, O>(p: &Prepared<'_, M, O>, cfg: &ExperimentConfig, arm: &Arm, seed: u64) -> Result<RunResult>
where
    M: Manifold,
    O: Objective<M>,
{
    let opts = RunOptions {
        thin: Some(cfg.thin),
        ..RunOptions::default()
    };
    let l = p.objective.smoothness();
    let traj: Trajectory<M::Point> = match arm {
        Arm::Silver => rgd_run(p.manifold, p.objective, &silver_prefix(cfg.iterations).with_smoothness(l)?, &p.x0, cfg.iterations, &opts)?,
        Arm::Constant(eta) => rgd_run(
            p.manifold,
            p.objective,
            &constant_schedule(*eta, cfg.iterations)?.with_smoothness(l)?,
            &p.x0,
            cfg.iterations,
            &opts,
        )?,
        Arm::Restart(cycles) => {
            let kappa = l / p.objective.strong_convexity();
            match cycles {
                RestartCycles::Fixed(c) => restarted_run(p.manifold, p.objective, &restart_plan(kappa, *c)?, &p.x0, &opts)?,
                RestartCycles::Auto => {
                    // Whole cycles covering the budget, truncated to
                    // `iterations` so every arm runs the same length.
                    let probe = restart_plan(kappa, 1)?;
                    let ratio = AUTO_RESTART_BUDGET as f64 / probe.inner_iters as f64;
                    let plan = restart_plan(kappa, 1usize << ratio.log2().ceil().max(0.0) as u32)?;
                    let schedule = plan.schedule_prefix(cfg.iterations).with_smoothness(l)?;
                    rgd_run(p.manifold, p.objective, &schedule, &p.x0, cfg.iterations.min(plan.total), &opts)?
                }
            }
        }
    };
    let label = arm.label();
    let status = traj.status.label().to_string();
    let errors: Vec<f64> = traj.values.iter().map(|v| v - p.f_star).collect();
    let last = traj.values.len() - 1;
    let mut records = Vec::new();
    for i in (0..=last).filter(|i| i % cfg.thin == 0 || *i == last) {
        let point = if i == last { Some(&traj.final_point) } else { traj.point(i) };
        let dist = match (p.has_reference, point) {
            (true, Some(x)) => p.objective.dist_sq_to_optimum(p.manifold, x).ok(),
            _ => None,
        };
        records.push(RunRecord {
            seed,
            arm: label.clone(),
            iteration: i,
            step_size: traj.applied_steps.get(i).copied(),
            objective_value: traj.values[i],
            error: errors[i],
            grad_norm_sq: traj.grad_norm_sq[i],
            dist_sq_to_ref: dist,
            status: status.clone(),
        });
    }
    Ok(RunResult {
        seed,
        arm: label,
        status: traj.status,
        records,
        errors,
    })
}

fn problem_seed(cfg: &ExperimentConfig, seed: u64) -> u64 {
    cfg.problem_seed.unwrap_or(seed)
}

fn run_seed_arm(cfg: &ExperimentConfig, seed: u64, arm: &Arm) -> Result<RunResult> {
    let d = cfg.dimension;
    let ps = problem_seed(cfg, seed);
    match cfg.experiment {
        ExperimentKind::BwPotential => {
            let f = random_quadratic_potential(d, cfg.l(), cfg.alpha_value(), ps)?;
            let m = if cfg.extended_covariance { BuresWasserstein::extended() } else { BuresWasserstein::new() };
            let p = Prepared {
                manifold: &m,
                objective: &f,
                x0: Gaussian::standard(d),
                f_star: 0.0,
                has_reference: true,
            };
            run_arm(&p, cfg, arm, seed)
        }
        ExperimentKind::Rayleigh => {
            let f = RayleighQuotient::new(make_rayleigh_h(d, cfg.rayleigh_kind, ps)?)?;
            let mut rng = ExperimentRng::with_stream(seed, 3);
            let p = Prepared {
                manifold: &Sphere,
                objective: &f,
                x0: SpherePoint::new(rng.unit_vector(d))?,
                f_star: f.optimal_value().unwrap_or(0.0),
                has_reference: true,
            };
            run_arm(&p, cfg, arm, seed)
        }
        ExperimentKind::MeanField => {
            let (train, _) = make_meanfield_data(cfg.target, cfg.samples, ps);
            let f = MeanFieldNet::new(cfg.width, train, cfg.l())?;
            let mut rng = ExperimentRng::with_stream(seed, 3);
            let p = Prepared {
                manifold: &Euclidean,
                objective: &f,
                x0: f.init(&mut rng),
                f_star: 0.0,
                has_reference: false,
            };
            run_arm(&p, cfg, arm, seed)
        }
        ExperimentKind::Custom => {
            let mut rng = ExperimentRng::new(ps);
            let q = rng.haar_orthogonal(d);
            let spectrum: Vec<f64> = sigma_star_spectrum(d, cfg.l(), cfg.alpha_value())?.iter().map(|v| 1.0 / v).collect();
            let center = DVector::from_fn(d, |_, _| rng.uniform());
            let f = EuclideanQuadratic::new(SymMatrix::from_spectrum(&q, &spectrum), center)?;
            let p = Prepared {
                manifold: &Euclidean,
                objective: &f,
                x0: DVector::zeros(d),
                f_star: 0.0,
                has_reference: true,
            };
            run_arm(&p, cfg, arm, seed)
        }
    }
}

/// Runs every (seed, arm) pair in parallel; results keep config order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let pairs: Vec<(u64, &Arm)> = cfg.seeds.iter().flat_map(|&s| cfg.arms.iter().map(move |a| (s, a))).collect();
    let runs = pairs
        .par_iter()
        .map(|&(seed, arm)| run_seed_arm(cfg, seed, arm))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult {
        config: cfg.clone(),
        runs,
    })
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Log-y line chart of the given curves.
pub fn render_svg(title: &str, curves: &[(String, Vec<f64>)]) -> String {
    let (w, h, left, right, top, bottom) = (800.0, 500.0, 70.0, 160.0, 40.0, 50.0);
    let positive = curves.iter().flat_map(|(_, c)| c.iter()).copied().filter(|v| v.is_finite() && *v > 0.0);
    let (lo, hi) = positive.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (lo, hi) = if lo.is_finite() { (lo.log10().floor(), hi.log10().ceil().max(lo.log10().floor() + 1.0)) } else { (0.0, 1.0) };
    let n = curves.iter().map(|(_, c)| c.len()).max().unwrap_or(1).max(2) - 1;
    let x = |i: usize| left + (w - left - right) * i as f64 / n as f64;
    let y = |v: f64| top + (h - top - bottom) * (hi - v.log10()) / (hi - lo);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{title}</text>"#, (left + w - right) / 2.0);
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - left - right,
        h - top - bottom
    );
    let step = ((hi - lo) / 10.0).ceil().max(1.0) as i64;
    let mut e = lo as i64;
    while e <= hi as i64 {
        let yy = y(10f64.powi(e as i32));
        let _ = writeln!(s, r##"<line x1="{left}" y1="{yy:.1}" x2="{}" y2="{yy:.1}" stroke="#ddd"/>"##, w - right);
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">1e{e}</text>"#, left - 6.0, yy + 4.0);
        e += step;
    }
    let _ = writeln!(s, r#"<text x="{left}" y="{}">0</text>"#, h - bottom + 18.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{n}</text>"#, w - right, h - bottom + 18.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">iteration</text>"#, (left + w - right) / 2.0, h - 12.0);
    for (k, (label, curve)) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = curve
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite() && **v > 0.0)
            .map(|(i, v)| format!("{:.1},{:.1}", x(i), y(v.max(10f64.powf(lo)).min(10f64.powf(hi)))))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = top + 16.0 + 18.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, w - right + 10.0, w - right + 30.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{label}</text>"#, w - right + 36.0, ly + 4.0);
    }
    s.push_str("</svg>\n");
    s
}

/// Level needed for `n` silver steps, for reporting.
pub fn covering_level(n: usize) -> u32 {
    ((n + 1) as f64).log2().ceil().clamp(1.0, MAX_LEVEL as f64) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "experiment = bw_potential\ndimension = 3\nkappa = 10\niterations = 31\nseeds = 0..3\narm = silver\narm = constant(1.99)\narm = restart(auto)\n";

    #[test]
    fn parse_and_validate() {
        let c = ExperimentConfig::parse(SMALL).unwrap();
        assert_eq!(c.seeds, vec![0, 1, 2]);
        assert_eq!(c.arms.len(), 3);
        assert_eq!(c.arms[1].label(), "constant(1.99)");
        let e = ExperimentConfig::parse("experiment = rayleigh\niterations = 0\n").unwrap_err();
        assert!(matches!(e, Error::Config { .. }));
        let e = ExperimentConfig::parse("experiment = custom\nfoo = 1\n").unwrap_err();
        assert_eq!(e, Error::Config { line: 2, message: "unknown key `foo`".into() });
        assert!(ExperimentConfig::parse("experiment = custom\narm = constant(0)\n").is_err());
        assert!(ExperimentConfig::parse("experiment = custom\nseeds = \n").is_err());
        assert!(ExperimentConfig::parse("experiment = rayleigh\narm = restart(2)\n").is_err());
    }

    #[test]
    fn percentiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile(&v, 0.5), 3.0);
        assert_eq!(percentile(&v, 0.025), 1.1);
        assert_eq!(percentile(&[7.0], 0.9), 7.0);
    }

    #[test]
    fn summary_roundtrips_through_rows() {
        let cfg = ExperimentConfig::parse(SMALL).unwrap();
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(summary_from_rows_csv(&res.rows_csv()).unwrap(), res.summary_csv());
        assert!(!res.all_diverged());
    }

    #[test]
    fn thinning_keeps_last_row_and_is_deterministic() {
        let text = SMALL.replace("iterations = 31", "iterations = 30\nthin = 4");
        let cfg = ExperimentConfig::parse(&text).unwrap();
        let a = run_experiment(&cfg).unwrap();
        let run = &a.runs[0];
        let its: Vec<usize> = run.records.iter().map(|r| r.iteration).collect();
        assert_eq!(its, vec![0, 4, 8, 12, 16, 20, 24, 28, 30]);
        assert!(run.records.iter().all(|r| r.dist_sq_to_ref.is_some()));
        assert_eq!(a.rows_csv(), run_experiment(&cfg).unwrap().rows_csv());
    }

    #[test]
    fn svg_has_one_polyline_per_arm() {
        let curves = vec![("a".to_string(), vec![1.0, 0.1, 0.01]), ("b".to_string(), vec![1.0, 0.5, 0.0])];
        let s = render_svg("t", &curves);
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.starts_with("<svg"));
    }
}
