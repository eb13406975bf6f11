//! Numerical certificates for the inequalities behind the silver-step
//! convergence analysis.
//!
//! Every check produces a signed gap that is nonnegative when the inequality
//! holds; a [`CertificateReport`] keeps the worst gap over a sampled battery
//! together with enough context to reproduce it.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::SpdMatrix;
use crate::manifolds::{BuresWasserstein, BwTangent, Euclidean, Gaussian, Manifold, Sphere, SpherePoint, TangentVector};
use crate::objectives::{
    make_rayleigh_h, random_quadratic_potential, EuclideanQuadratic, Objective, QuadraticPotential, RayleighKind,
    RayleighQuotient,
};
use crate::optimizer::{rgd_run, RunOptions};
use crate::rng::ExperimentRng;
use crate::schedules::{rate_r, silver_schedule, RHO};

pub mod curvature;
pub mod entropy;
pub mod inequalities;
pub mod lambda;

pub use curvature::{bw_sectional_curvature, curvature_table, CurvaturePair};
pub use entropy::{entropy_curve_check, entropy_curve_details, EntropyCurveDetails, Geometry};
pub use inequalities::{
    cocoercivity_gap, descent_gap, gen_convexity_gap, gradient_lipschitz_ratio, lemma51_sides, lemma52_gap, q_value,
};
pub use lambda::{lambda_recursion, LambdaMatrix, MAX_LAMBDA_LEVEL};

/// Default tolerance on certificate gaps.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Tolerance for trajectory checks against an ε-regularized optimum.
pub const SURROGATE_TOL: f64 = 1e-4;
/// Regularization of the degenerate Bures-Wasserstein optimum.
pub const SURROGATE_EPS: f64 = 1e-6;

/// Slack on the empirical gradient Lipschitz ratio.
pub const LIPSCHITZ_TOL: f64 = 1e-6;

pub const SUITES: [&str; 6] = ["geometry", "convexity", "lambda", "lemma52", "curvature", "entropy"];

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub name: String,
    pub samples: usize,
    /// Smallest signed gap; nonnegative when every sample satisfied the check.
    pub worst_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub witness: String,
}

impl CertificateReport {
    pub fn new(name: impl Into<String>, samples: usize, worst_gap: f64, tolerance: f64, witness: impl Into<String>) -> Self {
        CertificateReport {
            name: name.into(),
            samples,
            // Adding zero folds −0 into +0 for printing.
            worst_gap: worst_gap + 0.0,
            tolerance,
            pass: worst_gap >= -tolerance,
            witness: witness.into(),
        }
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}, {}, {:e}, {:e}, {}",
            self.name, self.samples, self.worst_gap, self.tolerance, self.pass
        )?;
        for line in self.witness.lines() {
            write!(f, "\n    {line}")?;
        }
        Ok(())
    }
}

/// Header line plus one entry per report.
pub fn format_reports(reports: &[CertificateReport]) -> String {
    let mut out = String::from("name, samples, worst_gap, tolerance, pass\n");
    for r in reports {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

/// Which objective the `convexity` and `lemma52` batteries exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SuiteTarget {
    /// Bures-Wasserstein quadratic potential (and Euclidean quadratics).
    #[default]
    Default,
    /// Rayleigh quotient on the sphere, which is not geodesically convex;
    /// failures there are informative.
    SphereRayleigh,
}

/// Running minimum over per-sample gaps; a `None` gap skips the sample.
struct Tracker {
    name: String,
    tolerance: f64,
    samples: usize,
    worst: f64,
    witness: String,
}

impl Tracker {
    fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Tracker {
            name: name.into(),
            tolerance,
            samples: 0,
            worst: f64::INFINITY,
            witness: String::new(),
        }
    }

    fn record(&mut self, gap: Option<f64>, witness: impl FnOnce() -> String) {
        let Some(gap) = gap else { return };
        self.samples += 1;
        // NaN must register as a failure.
        let gap = if gap.is_nan() { f64::NEG_INFINITY } else { gap };
        if gap < self.worst {
            self.worst = gap;
            self.witness = witness();
        }
    }

    fn finish(self) -> CertificateReport {
        let worst = if self.samples == 0 { 0.0 } else { self.worst };
        let witness = if self.samples == 0 { "no applicable samples".to_string() } else { self.witness };
        CertificateReport::new(self.name, self.samples, worst, self.tolerance, witness)
    }
}

/// Distinct stream per (suite, sample) so samples can run in any order.
fn sample_rng(seed: u64, suite: u64, index: usize) -> ExperimentRng {
    ExperimentRng::with_stream(seed, (suite << 32) | index as u64)
}

/// Runs `per_sample` on every index in parallel and folds the gaps into
/// one report per check name, in index order.
fn battery<F>(names: &[&str], tol: &[f64], prefix: &str, seed: u64, suite: u64, samples: usize, per_sample: F) -> Result<Vec<CertificateReport>>
where
    F: Fn(&mut ExperimentRng) -> Result<(Vec<Option<f64>>, String)> + Sync,
{
    let results: Vec<(Vec<Option<f64>>, String)> = (0..samples)
        .into_par_iter()
        .map(|i| per_sample(&mut sample_rng(seed, suite, i)))
        .collect::<Result<_>>()?;
    let mut trackers: Vec<Tracker> = names
        .iter()
        .zip(tol)
        .map(|(n, &t)| Tracker::new(format!("{prefix}/{n}"), t))
        .collect();
    for (i, (gaps, context)) in results.iter().enumerate() {
        for (t, &g) in trackers.iter_mut().zip(gaps) {
            t.record(g, || format!("seed = {seed}\nsample = {i}\n{context}"));
        }
    }
    Ok(trackers.into_iter().map(Tracker::finish).collect())
}

/// Random points and tangents for the sampled batteries.
trait Sampling: Manifold {
    fn random_point(&self, rng: &mut ExperimentRng, d: usize) -> Self::Point;
    fn random_tangent(&self, rng: &mut ExperimentRng, x: &Self::Point, scale: f64) -> Self::Tangent;
}

impl Sampling for Euclidean {
    fn random_point(&self, rng: &mut ExperimentRng, d: usize) -> DVector<f64> {
        rng.gaussian_vector(d)
    }
    fn random_tangent(&self, rng: &mut ExperimentRng, x: &DVector<f64>, scale: f64) -> DVector<f64> {
        rng.gaussian_vector(x.len()) * scale
    }
}

impl Sampling for Sphere {
    fn random_point(&self, rng: &mut ExperimentRng, d: usize) -> SpherePoint {
        SpherePoint::new(rng.unit_vector(d)).expect("unit vector")
    }
    fn random_tangent(&self, rng: &mut ExperimentRng, x: &SpherePoint, scale: f64) -> DVector<f64> {
        let d = x.dim();
        let g = rng.gaussian_vector(d) * (scale / (d as f64).sqrt());
        let p = x.as_vector();
        &g - p * p.dot(&g)
    }
}

fn symmetric_direction(rng: &mut ExperimentRng, d: usize, scale: f64) -> DMatrix<f64> {
    let g = rng.gaussian_matrix(d, d);
    (&g + g.transpose()) * (0.25 * scale / (d as f64).sqrt())
}

impl Sampling for BuresWasserstein {
    fn random_point(&self, rng: &mut ExperimentRng, d: usize) -> Gaussian {
        let base = Gaussian::standard(d);
        let v = self.random_tangent(rng, &base, 1.0);
        self.exp(&base, &v).expect("factor eigenvalues stay near one")
    }
    fn random_tangent(&self, rng: &mut ExperimentRng, x: &Gaussian, scale: f64) -> BwTangent {
        let d = x.dim();
        let shift = rng.gaussian_vector(d) * (scale / (d as f64).sqrt());
        BwTangent::new(shift, symmetric_direction(rng, d, scale)).expect("matching dimensions")
    }
}

/// Retries `attempt` on undefined logarithms (antipodal sphere samples).
fn with_retries<T>(rng: &mut ExperimentRng, mut attempt: impl FnMut(&mut ExperimentRng) -> Result<T>) -> Result<T> {
    let mut last = None;
    for _ in 0..16 {
        match attempt(rng) {
            Err(e @ Error::UndefinedLog { .. }) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

const GEOMETRY_CHECKS: [&str; 5] = ["roundtrip", "isometry", "reversal", "inverse", "lemma_c1"];

/// Errors of the five geometric identities at one sampled triple, reported
/// as nonpositive gaps. `flat` turns the metric-distortion inequality into
/// an equality check.
fn geometry_gaps<M: Sampling>(m: &M, rng: &mut ExperimentRng, d: usize, flat: bool) -> Result<Vec<Option<f64>>> {
    with_retries(rng, |rng| {
        let x = m.random_point(rng, d);
        let y = m.exp(&x, &m.random_tangent(rng, &x, 1.0))?;
        let z = m.exp(&x, &m.random_tangent(rng, &x, 1.0))?;
        let v = m.random_tangent(rng, &x, 1.0);

        let log_xy = m.log(&x, &y)?;
        let back = m.exp(&x, &log_xy)?;
        let roundtrip = m.coordinate_gap(&back, &y);

        let nv = m.norm_sq(&x, &v)?;
        let moved = m.transport(&x, &y, &v)?;
        let isometry = (m.norm_sq(&y, &moved)? - nv).abs() / (1.0 + nv);

        let log_yx = m.log(&y, &x)?;
        let rev = m.transport(&x, &y, &log_xy)?.add(&log_yx);
        let reversal = m.norm_sq(&y, &rev)?.max(0.0).sqrt() / (1.0 + m.norm_sq(&x, &log_xy)?.sqrt());

        let again = m.transport(&y, &x, &moved)?.sub(&v);
        let inverse = m.norm_sq(&x, &again)?.max(0.0).sqrt() / (1.0 + nv.sqrt());

        let log_xz = m.log(&x, &z)?;
        let spread = m.norm_sq(&x, &log_xz.sub(&log_xy))?;
        let c1 = (spread - m.norm_sq(&y, &m.log(&y, &z)?)?) / (1.0 + spread);
        let c1 = if flat { -c1.abs() } else { c1 };

        Ok(vec![Some(-roundtrip), Some(-isometry), Some(-reversal), Some(-inverse), Some(c1)])
    })
}

fn geometry_suite(seed: u64, samples: usize) -> Result<Vec<CertificateReport>> {
    let tol = [DEFAULT_TOL; 5];
    let mut out = battery(&GEOMETRY_CHECKS, &tol, "geometry/euclidean", seed, 10, samples, |rng| {
        let d = rng.int_range(1, 10);
        Ok((geometry_gaps(&Euclidean, rng, d, true)?, format!("d = {d}")))
    })?;
    out.extend(battery(&GEOMETRY_CHECKS, &tol, "geometry/sphere", seed, 11, samples, |rng| {
        let d = rng.int_range(2, 100);
        Ok((geometry_gaps(&Sphere, rng, d, false)?, format!("d = {d}")))
    })?);
    out.extend(battery(&GEOMETRY_CHECKS, &tol, "geometry/bures_wasserstein", seed, 12, samples, |rng| {
        let d = rng.int_range(1, 10);
        Ok((geometry_gaps(&BuresWasserstein::new(), rng, d, false)?, format!("d = {d}")))
    })?);
    Ok(out)
}

const CONVEXITY_CHECKS: [&str; 6] = [
    "gen_convexity",
    "cocoercivity",
    "descent",
    "q_certificate",
    "chain_cocoercivity",
    "chain_lipschitz",
];

/// Gaps of the convexity and smoothness inequalities at one sampled triple.
/// The last two entries follow the implication chain: co-coercivity where
/// both orderings of `Q` hold, and the gradient Lipschitz ratio where
/// co-coercivity holds (as `L − ratio`).
fn convexity_gaps<M, O>(m: &M, f: &O, rng: &mut ExperimentRng, d: usize) -> Result<Vec<Option<f64>>>
where
    M: Sampling,
    O: Objective<M>,
{
    let l = f.smoothness();
    with_retries(rng, |rng| {
        let x = m.random_point(rng, d);
        let y = m.exp(&x, &m.random_tangent(rng, &x, 1.0))?;
        let z = m.exp(&x, &m.random_tangent(rng, &x, 1.0))?;
        let gen = gen_convexity_gap(m, f, &x, &y, &z)?;
        let coco = cocoercivity_gap(m, f, &x, &y, l)?;
        let descent = descent_gap(m, f, &x, &y, l)?;
        let q_xy = q_value(m, f, &x, &y, l)?;
        let q_yx = q_value(m, f, &y, &x, l)?;
        let chain_coco = (q_xy >= 0.0 && q_yx >= 0.0).then_some(coco);
        let chain_lip = if coco >= 0.0 && m.dist_sq(&x, &y)? > 1e-16 {
            Some(l - gradient_lipschitz_ratio(m, f, &x, &y)?)
        } else {
            None
        };
        Ok(vec![Some(gen), Some(coco), Some(descent), Some(q_xy.min(q_yx)), chain_coco, chain_lip])
    })
}

fn convexity_suite(seed: u64, samples: usize, target: SuiteTarget) -> Result<Vec<CertificateReport>> {
    let tol = [DEFAULT_TOL, DEFAULT_TOL, DEFAULT_TOL, DEFAULT_TOL, DEFAULT_TOL, LIPSCHITZ_TOL];
    match target {
        SuiteTarget::Default => battery(&CONVEXITY_CHECKS, &tol, "convexity/bw_quadratic", seed, 20, samples, |rng| {
            let d = rng.int_range(1, 10);
            let l = rng.uniform_range(1.0, 10.0);
            let kappa = 10f64.powf(rng.uniform_range(0.0, 2.0));
            let problem_seed = rng.next_u64();
            let f = random_quadratic_potential(d, l, l / kappa, problem_seed)?;
            let gaps = convexity_gaps(&BuresWasserstein::new(), &f, rng, d)?;
            Ok((gaps, format!("d = {d}\nL = {l}\nkappa = {kappa}\nproblem_seed = {problem_seed}")))
        }),
        SuiteTarget::SphereRayleigh => {
            battery(&CONVEXITY_CHECKS, &tol, "convexity/sphere_rayleigh", seed, 21, samples, |rng| {
                let d = rng.int_range(2, 20);
                let problem_seed = rng.next_u64();
                let f = RayleighQuotient::new(make_rayleigh_h(d, RayleighKind::Wigner, problem_seed)?)?;
                let gaps = convexity_gaps(&Sphere, &f, rng, d)?;
                Ok((gaps, format!("d = {d}\nproblem_seed = {problem_seed}")))
            })
        }
    }
}

/// Closed-form checks on the multiplier recursion.
fn lambda_suite() -> Result<Vec<CertificateReport>> {
    let r1 = rate_r(1);
    let want = DMatrix::from_row_slice(3, 3, &[0.0, RHO, 0.0, 1.0, 0.0, RHO - 1.0, RHO - 1.0, 0.5 / r1, 0.0]);
    let base = lambda_recursion(1)?;
    let mismatch = (base.as_matrix() - &want).amax();
    let base_report = CertificateReport::new("lambda/base", 1, -mismatch, 0.0, format!("max |entry − closed form| = {mismatch:e}"));

    let mut nonneg = Tracker::new("lambda/nonnegative", 1e-12);
    for k in 1..=8 {
        let l = lambda_recursion(k)?;
        let (idx, min) = l.as_matrix().iter().enumerate().fold((0, f64::INFINITY), |(bi, bv), (i, &v)| {
            if v < bv { (i, v) } else { (bi, bv) }
        });
        let size = l.as_matrix().nrows();
        nonneg.record(Some(min), || format!("k = {k}\nentry = ({}, {})", idx % size, idx / size));
    }

    let mut identity = Tracker::new("lambda/rate_identity", 1e-9);
    let mut condition = Tracker::new("lambda/coefficient_condition", 0.0);
    for k in 1..=MAX_LAMBDA_LEVEL {
        let a = 0.5 / rate_r(k);
        let target = 1.0 - RHO.powi(2 * k as i32);
        identity.record(Some(-((a - a * a) - target).abs() / target.abs()), || format!("k = {k}"));
        condition.record(Some(a - 1.0 - RHO.powi(k as i32 - 1)), || format!("k = {k}"));
    }
    Ok(vec![base_report, nonneg.finish(), identity.finish(), condition.finish()])
}

fn random_euclidean_quadratic(rng: &mut ExperimentRng, d: usize) -> Result<EuclideanQuadratic> {
    let q = rng.haar_orthogonal(d);
    let vals: Vec<f64> = (0..d).map(|_| rng.uniform_range(0.05, 1.0)).collect();
    let a = crate::linalg::SymMatrix::from_spectrum(&q, &vals);
    EuclideanQuadratic::new(a, rng.gaussian_vector(d))
}

/// Smoothness is the largest eigenvalue; the run uses exactly that `L`.
fn euclidean_lemma_gaps(rng: &mut ExperimentRng) -> Result<(Vec<Option<f64>>, String)> {
    let d = rng.int_range(1, 5);
    let k = rng.int_range(1, 4) as u32;
    let f = random_euclidean_quadratic(rng, d)?;
    let l = f.smoothness();
    let x_star = f.optimum().ok_or(Error::MissingReference)?;
    let x0 = &x_star + rng.gaussian_vector(d);
    let n = (1usize << k) - 1;
    let sched = silver_schedule(k)?.with_smoothness(l)?;
    let t = rgd_run(&Euclidean, &f, &sched, &x0, n, &RunOptions::default())?;
    let gap52 = lemma52_gap(&Euclidean, &t.points, &f, l, k, &lambda_recursion(k)?, &x_star)?;
    let (lhs, rhs) = lemma51_sides(&Euclidean, &t.points, &f, l, k, &x_star)?;
    Ok((vec![Some(gap52), Some(lhs - rhs)], format!("d = {d}\nk = {k}")))
}

fn lemma52_suite(seed: u64, samples: usize, target: SuiteTarget) -> Result<Vec<CertificateReport>> {
    let instances = (samples / 20).max(1);
    match target {
        SuiteTarget::Default => {
            let mut out = battery(
                &["lemma52", "lemma51"],
                &[1e-7, DEFAULT_TOL],
                "lemma52/euclidean_quadratic",
                seed,
                30,
                instances,
                euclidean_lemma_gaps,
            )?;

            let f = EuclideanQuadratic::unit();
            let x0 = DVector::from_vec(vec![1.0]);
            let t = rgd_run(&Euclidean, &f, &silver_schedule(1)?, &x0, 1, &RunOptions::default())?;
            let gap = lemma52_gap(&Euclidean, &t.points, &f, 1.0, 1, &lambda_recursion(1)?, &DVector::zeros(1))?;
            out.push(CertificateReport::new("lemma52/unit_quadratic_tight", 1, -gap.abs(), 1e-9, format!("gap = {gap:e}")));

            out.extend(battery(&["lemma52"], &[SURROGATE_TOL], "lemma52/bw_surrogate", seed, 31, instances, |rng| {
                let d = rng.int_range(1, 5);
                let k = rng.int_range(1, 4) as u32;
                let problem_seed = rng.next_u64();
                let f = random_quadratic_potential(d, 1.0, 0.1, problem_seed)?;
                let gaps = bw_surrogate_gap(&f, rng, d, k)?;
                Ok((gaps, format!("d = {d}\nk = {k}\nproblem_seed = {problem_seed}")))
            })?);
            Ok(out)
        }
        SuiteTarget::SphereRayleigh => battery(&["lemma52"], &[DEFAULT_TOL], "lemma52/sphere_rayleigh", seed, 32, instances, |rng| {
            let d = rng.int_range(2, 20);
            let k = rng.int_range(1, 4) as u32;
            let problem_seed = rng.next_u64();
            let f = RayleighQuotient::new(make_rayleigh_h(d, RayleighKind::Wigner, problem_seed)?)?;
            let x0 = Sphere.random_point(rng, d);
            let n = (1usize << k) - 1;
            let sched = silver_schedule(k)?.with_smoothness(f.smoothness())?;
            let t = rgd_run(&Sphere, &f, &sched, &x0, n, &RunOptions::default())?;
            let v = f.optimum().ok_or(Error::MissingReference)?;
            // Of the two optima, the one the run approaches.
            let x_star = if v.as_vector().dot(t.final_point.as_vector()) >= 0.0 {
                v
            } else {
                SpherePoint::new(-v.as_vector())?
            };
            let gap = if t.points.len() == n + 1 {
                Some(lemma52_gap(&Sphere, &t.points, &f, f.smoothness(), k, &lambda_recursion(k)?, &x_star)?)
            } else {
                None
            };
            Ok((vec![gap], format!("d = {d}\nk = {k}\nproblem_seed = {problem_seed}")))
        }),
    }
}

/// Multiplier gap on the BW quadratic against the `(m*, εI)` surrogate. The
/// optimum is a point mass, so iterates can shrink past the SPD floor;
/// such runs, and runs that stop early, are skipped.
fn bw_surrogate_gap(f: &QuadraticPotential, rng: &mut ExperimentRng, d: usize, k: u32) -> Result<Vec<Option<f64>>> {
    let m = BuresWasserstein::new();
    let x_star = f.surrogate_optimum(SURROGATE_EPS)?;
    let x0 = m.random_point(rng, d);
    let n = (1usize << k) - 1;
    let sched = silver_schedule(k)?.with_smoothness(f.smoothness())?;
    let t = rgd_run(&m, f, &sched, &x0, n, &RunOptions::default())?;
    if !t.status.is_completed() {
        return Ok(vec![None]);
    }
    match lemma52_gap(&m, &t.points, f, f.smoothness(), k, &lambda_recursion(k)?, &x_star) {
        Ok(gap) => Ok(vec![Some(gap)]),
        Err(Error::DegenerateMatrix { .. }) => Ok(vec![None]),
        Err(e) => Err(e),
    }
}

fn curvature_suite(seed: u64, samples: usize) -> Result<Vec<CertificateReport>> {
    let mut out = Vec::new();
    let k = bw_sectional_curvature(&[1.0, 1.0], CurvaturePair::EijFij { i: 0, j: 1 })?;
    out.push(CertificateReport::new("curvature/unit_pair", 1, -(k - 1.5).abs(), 1e-12, format!("K = {k}")));
    for eps in [1e-1, 1e-3] {
        let k = bw_sectional_curvature(&[eps; 3], CurvaturePair::FijFik { i: 0, j: 1, k: 2 })?;
        let want = 3.0 / (8.0 * eps);
        out.push(CertificateReport::new(
            format!("curvature/flat_spectrum_{eps:e}"),
            1,
            -(k - want).abs() / want,
            1e-12,
            format!("K = {k}\nexpected = {want}"),
        ));
    }
    let other = bw_sectional_curvature(&[1.0, 2.0, 3.0], CurvaturePair::Other)?;
    out.push(CertificateReport::new("curvature/other", 1, -other.abs(), 0.0, format!("K = {other}")));

    let mut nonneg = Tracker::new("curvature/nonnegative", 0.0);
    for i in 0..samples.min(200) {
        let mut rng = sample_rng(seed, 40, i);
        let d = rng.int_range(1, 6);
        let mut lambdas: Vec<f64> = (0..d).map(|_| 10f64.powf(rng.uniform_range(-3.0, 3.0))).collect();
        lambdas.sort_by(f64::total_cmp);
        for (pair, k) in curvature_table(&lambdas)? {
            nonneg.record(Some(k), || format!("lambdas = {lambdas:?}\npair = {pair}"));
        }
    }
    out.push(nonneg.finish());
    Ok(out)
}

fn random_spd(rng: &mut ExperimentRng, d: usize) -> Result<SpdMatrix> {
    let q = rng.haar_orthogonal(d);
    let vals: Vec<f64> = (0..d).map(|_| rng.uniform_range(0.2, 5.0)).collect();
    SpdMatrix::from_spectrum(&q, &vals)
}

const ENTROPY_GRID: usize = 20;

fn entropy_suite(seed: u64, samples: usize) -> Result<Vec<CertificateReport>> {
    let triples = (samples / 10).max(1);
    battery(
        &["bures_wasserstein", "affine_invariant"],
        &[entropy::SECOND_DIFFERENCE_TOL; 2],
        "entropy",
        seed,
        50,
        triples,
        |rng| {
            let d = rng.int_range(1, 6);
            let (m0, m1, n) = (random_spd(rng, d)?, random_spd(rng, d)?, random_spd(rng, d)?);
            let bw = entropy_curve_details(&m0, &m1, &n, Geometry::BuresWasserstein, ENTROPY_GRID)?;
            let ai = entropy_curve_details(&m0, &m1, &n, Geometry::AffineInvariant, ENTROPY_GRID)?;
            let mismatch = bw.analytic_mismatch.unwrap_or(0.0);
            Ok((
                vec![Some(bw.worst_gap()), Some(ai.worst_gap())],
                format!("d = {d}\ngrid = {ENTROPY_GRID}\nanalytic_mismatch = {mismatch:e}"),
            ))
        },
    )
}

fn run_one(name: &str, target: SuiteTarget, seed: u64, samples: usize) -> Result<Vec<CertificateReport>> {
    match name {
        "geometry" => geometry_suite(seed, samples),
        "convexity" => convexity_suite(seed, samples, target),
        "lambda" => lambda_suite(),
        "lemma52" => lemma52_suite(seed, samples, target),
        "curvature" => curvature_suite(seed, samples),
        "entropy" => entropy_suite(seed, samples),
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

/// Runs the named batteries; reports come back grouped by suite in the
/// order requested. Identical seeds give identical reports.
pub fn run_suite<S: AsRef<str> + Sync>(names: &[S], seed: u64, samples: usize) -> Result<Vec<CertificateReport>> {
    run_suite_for(names, SuiteTarget::Default, seed, samples)
}

pub fn run_suite_for<S: AsRef<str> + Sync>(
    names: &[S],
    target: SuiteTarget,
    seed: u64,
    samples: usize,
) -> Result<Vec<CertificateReport>> {
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(&n.as_ref())) {
        return Err(Error::UnknownSuite(bad.as_ref().to_string()));
    }
    let groups: Vec<Vec<CertificateReport>> = names
        .par_iter()
        .map(|n| run_one(n.as_ref(), target, seed, samples))
        .collect::<Result<_>>()?;
    Ok(groups.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_pass_rule_and_format() {
        let r = CertificateReport::new("x", 3, -1e-9, 1e-8, "a = 1\nb = 2");
        assert!(r.pass);
        assert!(!CertificateReport::new("x", 3, -1e-7, 1e-8, "").pass);
        let text = format_reports(&[r]);
        assert_eq!(text, "name, samples, worst_gap, tolerance, pass\nx, 3, -1e-9, 1e-8, true\n    a = 1\n    b = 2\n");
    }

    #[test]
    fn empty_and_unknown() {
        let none: [&str; 0] = [];
        assert!(run_suite(&none, 1, 10).unwrap().is_empty());
        assert_eq!(run_suite(&["nope"], 1, 10), Err(Error::UnknownSuite("nope".into())));
    }

    #[test]
    fn small_batteries_pass_and_repeat() {
        let names = ["geometry", "convexity", "lambda", "curvature"];
        let a = run_suite(&names, 7, 40).unwrap();
        for r in &a {
            assert!(r.pass, "{r}");
        }
        assert_eq!(a, run_suite(&names, 7, 40).unwrap());
    }
}
