//! Pointwise and trajectory inequalities consumed by the convergence proof.
//!
//! Every function returns a signed gap that is non-negative when the
//! inequality holds.

use crate::error::{Error, Result};
use crate::manifolds::{Manifold, TangentVector};
use crate::objectives::Objective;
use crate::schedules::{rate_r, silver_step};

use super::lambda::LambdaMatrix;

/// `2L(f_i − f_j) − 2L⟨g_j, log_{x_j} x_i⟩ − ‖Γ_{x_i}^{x_j} g_i − g_j‖²`, with the
/// last term expanded as `‖g_i‖² + ‖g_j‖² − 2⟨g_j, Γ g_i⟩`.
pub fn q_value<M, O>(manifold: &M, f: &O, xi: &M::Point, xj: &M::Point, l: f64) -> Result<f64>
where
    M: Manifold,
    O: Objective<M> + ?Sized,
{
    let gi = f.grad(xi)?;
    let gj = f.grad(xj)?;
    let fi = f.value(xi)?;
    let fj = f.value(xj)?;
    let log_ji = manifold.log(xj, xi)?;
    let moved = manifold.transport(xi, xj, &gi)?;
    Ok(2.0 * l * (fi - fj) - 2.0 * l * manifold.inner(xj, &gj, &log_ji)?
        - manifold.norm_sq(xi, &gi)?
        - manifold.norm_sq(xj, &gj)?
        + 2.0 * manifold.inner(xj, &gj, &moved)?)
}

/// Convexity with base `z`: `f(y) − f(x) − ⟨Γ_x^z Grad f(x), log_z y − log_z x⟩_z`.
/// With `z = x` this is the ordinary geodesic-convexity gap.
pub fn gen_convexity_gap<M, O>(
    manifold: &M,
    f: &O,
    x: &M::Point,
    y: &M::Point,
    z: &M::Point,
) -> Result<f64>
where
    M: Manifold,
    O: Objective<M> + ?Sized,
{
    let g = manifold.transport(x, z, &f.grad(x)?)?;
    let dir = manifold.log(z, y)?.sub(&manifold.log(z, x)?);
    Ok(f.value(y)? - f.value(x)? - manifold.inner(z, &g, &dir)?)
}

/// `⟨Γ_y^x g_y − g_x, log_x y⟩ − (1/L)‖Γ_y^x g_y − g_x‖²`.
pub fn cocoercivity_gap<M, O>(manifold: &M, f: &O, x: &M::Point, y: &M::Point, l: f64) -> Result<f64>
where
    M: Manifold,
    O: Objective<M> + ?Sized,
{
    let diff = manifold.transport(y, x, &f.grad(y)?)?.sub(&f.grad(x)?);
    let log = manifold.log(x, y)?;
    Ok(manifold.inner(x, &diff, &log)? - manifold.norm_sq(x, &diff)? / l)
}

/// `‖Γ_y^x g_y − g_x‖ / d(x, y)`, the empirical gradient Lipschitz ratio.
pub fn gradient_lipschitz_ratio<M, O>(manifold: &M, f: &O, x: &M::Point, y: &M::Point) -> Result<f64>
where
    M: Manifold,
    O: Objective<M> + ?Sized,
{
    let diff = manifold.transport(y, x, &f.grad(y)?)?.sub(&f.grad(x)?);
    Ok(manifold.norm_sq(x, &diff)?.sqrt() / manifold.dist(x, y)?)
}

/// `f(x) + ⟨Grad f(x), log_x y⟩ + (L/2) d²(x, y) − f(y)`.
pub fn descent_gap<M, O>(manifold: &M, f: &O, x: &M::Point, y: &M::Point, l: f64) -> Result<f64>
where
    M: Manifold,
    O: Objective<M> + ?Sized,
{
    let log = manifold.log(x, y)?;
    Ok(f.value(x)? + manifold.inner(x, &f.grad(x)?, &log)? + 0.5 * l * manifold.dist_sq(x, y)?
        - f.value(y)?)
}

/// An iterate with value and gradient rescaled by `1/L`.
struct Scaled<P, T> {
    x: P,
    f: f64,
    g: T,
}

/// Iterates `x_0..=x_n` followed by the reference point, all at scale `L = 1`.
struct ScaledRun<P, T> {
    iterates: Vec<Scaled<P, T>>,
    star: Scaled<P, T>,
}

fn scale_run<M, O>(
    manifold: &M,
    points: &[M::Point],
    f: &O,
    l: f64,
    x_star: &M::Point,
) -> Result<ScaledRun<M::Point, M::Tangent>>
where
    M: Manifold,
    O: Objective<M> + ?Sized,
{
    let iterates = points
        .iter()
        .map(|x| {
            Ok(Scaled {
                x: x.clone(),
                f: f.value(x)? / l,
                g: f.grad(x)?.scale(1.0 / l),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let star = Scaled {
        x: x_star.clone(),
        f: f.value(x_star)? / l,
        g: manifold.zero_tangent(x_star),
    };
    Ok(ScaledRun { iterates, star })
}

fn check_len(points: usize, k: u32) -> Result<usize> {
    let n = (1usize << k) - 1;
    if points < n + 1 {
        return Err(Error::InvalidArgument(format!(
            "level {k} needs {} iterates, got {points}",
            n + 1
        )));
    }
    Ok(n)
}

/// `A_n` of the proof, at `L = 1`.
fn a_n<M: Manifold>(manifold: &M, run: &ScaledRun<M::Point, M::Tangent>, n: usize, k: u32) -> Result<f64> {
    let a = 0.5 / rate_r(k);
    let last = &run.iterates[n];
    let log_n = manifold.log(&last.x, &run.star.x)?;
    let mut total = a * a * manifold.norm_sq(&last.x, &last.g)? + 2.0 * a * manifold.inner(&last.x, &last.g, &log_n)?;
    for (i, it) in run.iterates[..n].iter().enumerate() {
        let eta = silver_step(i as u64);
        let log_i = manifold.log(&it.x, &run.star.x)?;
        total += eta * eta * manifold.norm_sq(&it.x, &it.g)? + 2.0 * eta * manifold.inner(&it.x, &it.g, &log_i)?;
    }
    Ok(total)
}

/// Both sides of the metric-distortion lemma at `n = 2^k − 1`:
/// `lhs = A_n`, `rhs = ‖log_{x_n} x* + (2r_k)⁻¹ g_n‖² − d²(x_0, x*)`.
///
/// `points` must be a silver trajectory run with steps `η_i / l`.
pub fn lemma51_sides<M, O>(
    manifold: &M,
    points: &[M::Point],
    f: &O,
    l: f64,
    k: u32,
    x_star: &M::Point,
) -> Result<(f64, f64)>
where
    M: Manifold,
    O: Objective<M> + ?Sized,
{
    let n = check_len(points.len(), k)?;
    let run = scale_run(manifold, &points[..=n], f, l, x_star)?;
    let lhs = a_n(manifold, &run, n, k)?;
    let last = &run.iterates[n];
    let a = 0.5 / rate_r(k);
    let v = manifold.log(&last.x, x_star)?.add(&last.g.scale(a));
    let rhs = manifold.norm_sq(&last.x, &v)? - manifold.dist_sq(&points[0], x_star)?;
    Ok((lhs, rhs))
}

fn scaled_q<M: Manifold>(manifold: &M, a: &Scaled<M::Point, M::Tangent>, b: &Scaled<M::Point, M::Tangent>) -> Result<f64> {
    let log_ba = manifold.log(&b.x, &a.x)?;
    let moved = manifold.transport(&a.x, &b.x, &a.g)?;
    Ok(2.0 * (a.f - b.f) - 2.0 * manifold.inner(&b.x, &b.g, &log_ba)?
        - manifold.norm_sq(&a.x, &a.g)?
        - manifold.norm_sq(&b.x, &b.g)?
        + 2.0 * manifold.inner(&b.x, &b.g, &moved)?)
}

/// `[r_k⁻¹(f* − f_n) − A_n] − Σ λ_ij Q_ij` at `L = 1`, with the gradient at
/// the reference point taken as zero.
pub fn lemma52_gap<M, O>(
    manifold: &M,
    points: &[M::Point],
    f: &O,
    l: f64,
    k: u32,
    lambda: &LambdaMatrix,
    x_star: &M::Point,
) -> Result<f64>
where
    M: Manifold,
    O: Objective<M> + ?Sized,
{
    if lambda.level() != k {
        return Err(Error::InvalidArgument(format!(
            "coefficient level {} does not match k = {k}",
            lambda.level()
        )));
    }
    let n = check_len(points.len(), k)?;
    let run = scale_run(manifold, &points[..=n], f, l, x_star)?;
    let node = |i: usize| if i == n + 1 { &run.star } else { &run.iterates[i] };
    let mut weighted = 0.0;
    for i in 0..=n + 1 {
        for j in 0..=n + 1 {
            let c = lambda.get(i, j);
            if c != 0.0 {
                weighted += c * scaled_q(manifold, node(i), node(j))?;
            }
        }
    }
    let rhs = (run.star.f - run.iterates[n].f) / rate_r(k) - a_n(manifold, &run, n, k)?;
    Ok(rhs - weighted)
}
