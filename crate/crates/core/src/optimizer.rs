//! Riemannian gradient descent `x_{n+1} = exp_{x_n}(−(η_n/L) Grad f(x_n))`.

use crate::error::{Error, Result};
use crate::manifolds::{Manifold, TangentVector};
use crate::objectives::Objective;
use crate::schedules::{rate_r, RestartPlan, StepSchedule};

/// Above this dimension points are kept every `thin` iterations only.
pub const FULL_STORAGE_MAX_DIM: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Completed,
    /// The value or squared gradient norm at iterate `at` blew up.
    Diverged { at: usize },
    /// The update producing iterate `at` left the manifold.
    DegenerateStop { at: usize },
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Completed => "completed",
            Status::Diverged { .. } => "diverged",
            Status::DegenerateStop { .. } => "degenerate_stop",
        }
    }

    pub fn is_completed(&self) -> bool {
        matches!(self, Status::Completed)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory<P> {
    /// Iterates `0, stride, 2·stride, …` (every iterate when `stride == 1`).
    pub points: Vec<P>,
    pub stride: usize,
    /// The last iterate reached, stored regardless of thinning.
    pub final_point: P,
    pub values: Vec<f64>,
    pub grad_norm_sq: Vec<f64>,
    /// `η_i / L` for each applied update.
    pub applied_steps: Vec<f64>,
    pub status: Status,
}

impl<P: Clone> Trajectory<P> {
    pub fn iterations(&self) -> usize {
        self.applied_steps.len()
    }

    pub fn initial_point(&self) -> &P {
        &self.points[0]
    }

    /// Iterate `i` if it was stored.
    pub fn point(&self, i: usize) -> Option<&P> {
        if i == self.iterations() && self.values.len() == i + 1 {
            return Some(&self.final_point);
        }
        if i.is_multiple_of(self.stride) {
            self.points.get(i / self.stride)
        } else {
            None
        }
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("trajectory has an initial value")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Point stride; `None` keeps every point up to dimension 256 and every
    /// tenth point beyond.
    pub thin: Option<usize>,
    /// Absolute blow-up threshold on the value and squared gradient norm.
    pub divergence_threshold: f64,
    /// Relative blow-up threshold: `f(x_i) > growth · max(1, |f(x_0)|)`.
    pub divergence_growth: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            thin: None,
            divergence_threshold: 1e100,
            divergence_growth: 1e6,
        }
    }
}

impl RunOptions {
    fn stride(&self, dim: usize) -> usize {
        match self.thin {
            Some(t) => t.max(1),
            None if dim <= FULL_STORAGE_MAX_DIM => 1,
            None => 10,
        }
    }
}

/// Runs `n` updates of `schedule` from `x0`. Failures end the run early and
/// are reported through [`Trajectory::status`]; only an invalid starting
/// point is an error.
pub fn rgd_run<M, O>(
    manifold: &M,
    objective: &O,
    schedule: &StepSchedule,
    x0: &M::Point,
    n: usize,
    opts: &RunOptions,
) -> Result<Trajectory<M::Point>>
where
    M: Manifold,
    O: Objective<M> + ?Sized,
{
    let stride = opts.stride(manifold.point_dim(x0));
    let f0 = objective.value(x0)?;
    let ceiling = opts.divergence_growth * f0.abs().max(1.0);
    let mut traj = Trajectory {
        points: vec![x0.clone()],
        stride,
        final_point: x0.clone(),
        values: Vec::with_capacity(n + 1),
        grad_norm_sq: Vec::with_capacity(n + 1),
        applied_steps: Vec::with_capacity(n),
        status: Status::Completed,
    };
    let mut x = x0.clone();
    for i in 0..=n {
        let evaluated = objective.value(&x).and_then(|f| {
            let g = objective.grad(&x)?;
            let gn = manifold.norm_sq(&x, &g)?;
            Ok((f, g, gn))
        });
        let (f, g, gn) = match evaluated {
            Ok(t) => t,
            Err(_) => {
                traj.status = Status::DegenerateStop { at: i };
                break;
            }
        };
        traj.values.push(f);
        traj.grad_norm_sq.push(gn);
        let blown = !f.is_finite()
            || !gn.is_finite()
            || f.abs() > opts.divergence_threshold
            || gn > opts.divergence_threshold
            || f > ceiling;
        if blown {
            traj.status = Status::Diverged { at: i };
            break;
        }
        if i == n {
            break;
        }
        let step = schedule.applied(i);
        match manifold.exp(&x, &g.scale(-step)) {
            Ok(next) => {
                traj.applied_steps.push(step);
                x = next;
                if (i + 1) % stride == 0 {
                    traj.points.push(x.clone());
                }
                traj.final_point = x.clone();
            }
            Err(_) => {
                traj.status = Status::DegenerateStop { at: i + 1 };
                break;
            }
        }
    }
    Ok(traj)
}

/// `plan.cycles` silver blocks of `plan.inner_iters` steps, each restarting
/// the schedule at index 0 from the previous block's last iterate.
pub fn restarted_run<M, O>(
    manifold: &M,
    objective: &O,
    plan: &RestartPlan,
    x0: &M::Point,
    opts: &RunOptions,
) -> Result<Trajectory<M::Point>>
where
    M: Manifold,
    O: Objective<M> + ?Sized,
{
    if !(objective.strong_convexity() > 0.0) {
        return Err(Error::InvalidArgument(
            "restarting needs a strongly convex objective".into(),
        ));
    }
    let schedule = plan.schedule().with_smoothness(objective.smoothness())?;
    rgd_run(manifold, objective, &schedule, x0, plan.total, opts)
}

/// Convergence bound `f(x_n) − f* ≤ r_k L D²` at `n = 2^k − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub k: u32,
    pub r_k: f64,
    pub smoothness: f64,
    pub d_squared: f64,
    pub bound: f64,
    pub achieved: f64,
    pub satisfied: bool,
    pub margin: f64,
}

pub fn check_bound<M, O>(
    manifold: &M,
    traj: &Trajectory<M::Point>,
    objective: &O,
    k: u32,
) -> Result<BoundReport>
where
    M: Manifold,
    O: Objective<M> + ?Sized,
{
    let n = (1usize << k) - 1;
    let f_star = objective.optimal_value().ok_or(Error::MissingReference)?;
    let f_n = *traj.values.get(n).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "trajectory has {} iterates, bound needs {}",
            traj.values.len(),
            n + 1
        ))
    })?;
    let d_squared = objective.dist_sq_to_optimum(manifold, traj.initial_point())?;
    let r_k = rate_r(k);
    let smoothness = objective.smoothness();
    let bound = r_k * smoothness * d_squared;
    let achieved = f_n - f_star;
    Ok(BoundReport {
        k,
        r_k,
        smoothness,
        d_squared,
        bound,
        achieved,
        satisfied: achieved <= bound + 1e-9 * (1.0 + bound),
        margin: bound - achieved,
    })
}

/// `f(x_i) − f*` for each recorded value.
pub fn error_curve<P>(traj: &Trajectory<P>, f_star: f64) -> Vec<f64> {
    traj.values.iter().map(|v| v - f_star).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::{BuresWasserstein, Euclidean, Gaussian, Sphere};
    use crate::objectives::{
        make_rayleigh_h, random_quadratic_potential, EuclideanQuadratic, QuadraticPotential,
        RayleighKind, RayleighQuotient,
    };
    use crate::linalg::SpdMatrix;
    use crate::rng::ExperimentRng;
    use crate::schedules::{constant_schedule, restart_plan, silver_schedule};
    use nalgebra::DVector;

    #[test]
    fn zero_iterations() {
        let f = EuclideanQuadratic::unit();
        let x0 = DVector::from_vec(vec![1.0]);
        let s = constant_schedule(1.0, 1).unwrap();
        let t = rgd_run(&Euclidean, &f, &s, &x0, 0, &RunOptions::default()).unwrap();
        assert_eq!(t.points.len(), 1);
        assert!(t.applied_steps.is_empty());
        assert_eq!(t.values, vec![0.5]);
    }

    #[test]
    fn unit_quadratic_one_step() {
        let f = EuclideanQuadratic::unit();
        let x0 = DVector::from_vec(vec![1.0]);
        let s = constant_schedule(1.0, 1).unwrap();
        let t = rgd_run(&Euclidean, &f, &s, &x0, 1, &RunOptions::default()).unwrap();
        assert_eq!(t.final_point[0], 0.0);
        assert_eq!(t.points.len(), t.applied_steps.len() + 1);

        let s = silver_schedule(1).unwrap();
        let t = rgd_run(&Euclidean, &f, &s, &x0, 1, &RunOptions::default()).unwrap();
        let rep = check_bound(&Euclidean, &t, &f, 1).unwrap();
        assert!((rep.achieved - 0.5 * (std::f64::consts::SQRT_2 - 1.0).powi(2)).abs() < 1e-15);
        assert!((rep.bound - 0.18158466).abs() < 1e-8);
        assert!(rep.satisfied);
    }

    #[test]
    fn annihilated_covariance_stops() {
        let p = QuadraticPotential::new(DVector::zeros(3), SpdMatrix::identity(3)).unwrap();
        let s = constant_schedule(1.0, 5).unwrap();
        let t = rgd_run(&BuresWasserstein::new(), &p, &s, &Gaussian::standard(3), 5, &RunOptions::default()).unwrap();
        assert_eq!(t.status, Status::DegenerateStop { at: 1 });
        assert_eq!(t.values.len(), 1);
    }

    #[test]
    fn restart_blocks_reset() {
        let p = random_quadratic_potential(4, 1.0, 0.1, 2).unwrap();
        let plan = restart_plan(10.0, 3).unwrap();
        let t = restarted_run(&BuresWasserstein::new(), &p, &plan, &Gaussian::standard(4), &RunOptions::default()).unwrap();
        assert!(t.status.is_completed());
        for b in 0..3 {
            assert_eq!(t.applied_steps[b * plan.inner_iters], std::f64::consts::SQRT_2);
        }
        let single = rgd_run(
            &BuresWasserstein::new(),
            &p,
            &silver_schedule(plan.k_star).unwrap(),
            &Gaussian::standard(4),
            plan.inner_iters,
            &RunOptions::default(),
        )
        .unwrap();
        assert_eq!(single.values[..], t.values[..plan.inner_iters + 1]);
    }

    #[test]
    fn large_constant_step_diverges() {
        let p = random_quadratic_potential(10, 1.0, 1e-3, 1).unwrap();
        let s = constant_schedule(2.01, 1500).unwrap();
        let t = rgd_run(&BuresWasserstein::new(), &p, &s, &Gaussian::standard(10), 1500, &RunOptions::default()).unwrap();
        assert!(matches!(t.status, Status::Diverged { .. }));
    }

    #[test]
    fn sphere_iterates_stay_unit() {
        let h = make_rayleigh_h(20, RayleighKind::Wigner, 4).unwrap();
        let f = RayleighQuotient::new(h).unwrap();
        let mut rng = ExperimentRng::new(8);
        let x0 = crate::manifolds::SpherePoint::new(rng.unit_vector(20)).unwrap();
        let s = silver_schedule(10).unwrap().with_smoothness(f.smoothness()).unwrap();
        let t = rgd_run(&Sphere, &f, &s, &x0, 1023, &RunOptions::default()).unwrap();
        assert!(t.status.is_completed());
        for p in &t.points {
            assert!((p.as_vector().norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_descent_monotone() {
        let p = random_quadratic_potential(6, 1.0, 0.05, 7).unwrap();
        let s = constant_schedule(1.0, 200).unwrap();
        let strict = rgd_run(&BuresWasserstein::new(), &p, &s, &Gaussian::standard(6), 200, &RunOptions::default()).unwrap();
        assert_eq!(strict.status, Status::DegenerateStop { at: 1 });
        let t = rgd_run(&BuresWasserstein::extended(), &p, &s, &Gaussian::standard(6), 200, &RunOptions::default()).unwrap();
        assert!(t.status.is_completed());
        for w in t.values.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        let e = error_curve(&t, 0.0);
        assert!(e.last().unwrap() < &e[0]);
    }
}
