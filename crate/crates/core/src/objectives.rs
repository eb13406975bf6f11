//! Objectives with Riemannian gradients, declared constants and reference
//! optima, plus the seeded problem generators used by the experiments.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{log_det, spd_inverse, sym_eigen, EigenDecomposition, SpdMatrix, SymMatrix};
use crate::manifolds::{BuresWasserstein, BwTangent, Euclidean, Gaussian, Manifold, Sphere, SpherePoint};
use crate::rng::ExperimentRng;

pub trait Objective<M: Manifold>: Send + Sync {
    fn value(&self, x: &M::Point) -> Result<f64>;

    /// Riemannian gradient at `x`.
    fn grad(&self, x: &M::Point) -> Result<M::Tangent>;

    /// Declared smoothness constant `L`.
    fn smoothness(&self) -> f64;

    /// Declared strong-convexity constant; 0 when merely convex.
    fn strong_convexity(&self) -> f64 {
        0.0
    }

    /// Infimum of the objective, when known.
    fn optimal_value(&self) -> Option<f64> {
        None
    }

    /// A minimizer on the manifold, when one exists and is known.
    fn optimum(&self) -> Option<M::Point> {
        None
    }

    /// Squared distance from `x` to the reference optimum.
    fn dist_sq_to_optimum(&self, manifold: &M, x: &M::Point) -> Result<f64> {
        match self.optimum() {
            Some(opt) => manifold.dist_sq(x, &opt),
            None => Err(Error::MissingReference),
        }
    }
}

/// A potential `V: R^d → R` lifted to Gaussians as `μ ↦ E_μ[V]`.
///
/// Implementors supply the Gaussian expectations of `V`, `∇V` and `∇²V`; the
/// Wasserstein gradient at `N(m, Σ)` is then `(E[∇V], E[∇²V])`.
pub trait Potential: Send + Sync {
    fn dim(&self) -> usize;
    fn expected_value(&self, x: &Gaussian) -> Result<f64>;
    fn expected_grad(&self, x: &Gaussian) -> Result<DVector<f64>>;
    fn expected_hessian(&self, x: &Gaussian) -> Result<DMatrix<f64>>;
}

/// Wasserstein gradient of a lifted potential.
pub fn potential_grad<V: Potential + ?Sized>(v: &V, x: &Gaussian) -> Result<BwTangent> {
    BwTangent::new(v.expected_grad(x)?, v.expected_hessian(x)?)
}

/// `V(x) = ½ (x − m*)ᵀ Σ*⁻¹ (x − m*)`.
#[derive(Debug, Clone)]
pub struct QuadraticPotential {
    m_star: DVector<f64>,
    sigma_star: SpdMatrix,
    precision: DMatrix<f64>,
    lambda_min: f64,
    lambda_max: f64,
}

impl QuadraticPotential {
    pub fn new(m_star: DVector<f64>, sigma_star: SpdMatrix) -> Result<Self> {
        check_dim(sigma_star.dim(), m_star.len())?;
        let eig = sigma_star.checked_eigen()?;
        let precision = spd_inverse(&sigma_star)?.as_matrix().clone();
        Ok(QuadraticPotential {
            lambda_min: eig.min(),
            lambda_max: eig.max(),
            m_star,
            sigma_star,
            precision,
        })
    }

    /// Exact construction from an orthogonal basis and the spectrum of `Σ*`,
    /// so `L` and `α` carry no eigensolver error at large condition numbers.
    pub fn from_spectrum(m_star: DVector<f64>, basis: &DMatrix<f64>, eigenvalues: &[f64]) -> Result<Self> {
        let sigma_star = SpdMatrix::from_spectrum(basis, eigenvalues)?;
        check_dim(sigma_star.dim(), m_star.len())?;
        let inv: Vec<f64> = eigenvalues.iter().map(|v| 1.0 / v).collect();
        let precision = SymMatrix::from_spectrum(basis, &inv).into_inner();
        let lambda_min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let lambda_max = eigenvalues.iter().copied().fold(0.0, f64::max);
        Ok(QuadraticPotential {
            m_star,
            sigma_star,
            precision,
            lambda_min,
            lambda_max,
        })
    }

    pub fn m_star(&self) -> &DVector<f64> {
        &self.m_star
    }

    pub fn sigma_star(&self) -> &SpdMatrix {
        &self.sigma_star
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    pub fn condition_number(&self) -> f64 {
        self.lambda_max / self.lambda_min
    }

    /// `(m*, εI)`, a non-degenerate stand-in for the degenerate minimizer.
    pub fn surrogate_optimum(&self, eps: f64) -> Result<Gaussian> {
        Gaussian::new(
            self.m_star.clone(),
            SpdMatrix::scaled_identity(self.m_star.len(), eps)?,
        )
    }
}

impl Potential for QuadraticPotential {
    fn dim(&self) -> usize {
        self.m_star.len()
    }

    fn expected_value(&self, x: &Gaussian) -> Result<f64> {
        check_dim(self.dim(), x.dim())?;
        let dm = &x.mean - &self.m_star;
        let quad = dm.dot(&(&self.precision * &dm));
        Ok(0.5 * quad + 0.5 * self.precision.dot(x.cov.as_matrix()))
    }

    fn expected_grad(&self, x: &Gaussian) -> Result<DVector<f64>> {
        check_dim(self.dim(), x.dim())?;
        Ok(&self.precision * (&x.mean - &self.m_star))
    }

    fn expected_hessian(&self, x: &Gaussian) -> Result<DMatrix<f64>> {
        check_dim(self.dim(), x.dim())?;
        Ok(self.precision.clone())
    }
}

impl Objective<BuresWasserstein> for QuadraticPotential {
    fn value(&self, x: &Gaussian) -> Result<f64> {
        self.expected_value(x)
    }

    fn grad(&self, x: &Gaussian) -> Result<BwTangent> {
        potential_grad(self, x)
    }

    fn smoothness(&self) -> f64 {
        1.0 / self.lambda_min
    }

    fn strong_convexity(&self) -> f64 {
        1.0 / self.lambda_max
    }

    fn optimal_value(&self) -> Option<f64> {
        Some(0.0)
    }

    /// The minimizer `(m*, 0)` is degenerate; the extended squared distance
    /// `‖m − m*‖² + tr Σ` is used instead.
    fn dist_sq_to_optimum(&self, _manifold: &BuresWasserstein, x: &Gaussian) -> Result<f64> {
        check_dim(self.dim(), x.dim())?;
        Ok((&x.mean - &self.m_star).norm_squared() + x.cov.trace())
    }
}

/// `H(Σ) = −½ log det Σ` on Gaussians (the mean is ignored).
#[derive(Debug, Clone, Copy)]
pub struct GaussianEntropy {
    smoothness: f64,
}

impl GaussianEntropy {
    /// The entropy is not globally smooth; `smoothness` is the value used to
    /// scale step sizes on a region of interest.
    pub fn new(smoothness: f64) -> Self {
        GaussianEntropy { smoothness }
    }
}

impl Objective<BuresWasserstein> for GaussianEntropy {
    fn value(&self, x: &Gaussian) -> Result<f64> {
        Ok(-0.5 * log_det(&x.cov)?)
    }

    fn grad(&self, x: &Gaussian) -> Result<BwTangent> {
        let inv = spd_inverse(&x.cov)?;
        BwTangent::new(DVector::zeros(x.dim()), -inv.as_matrix())
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }
}

/// `f(x) = −½ xᵀHx` on the unit sphere.
#[derive(Debug, Clone)]
pub struct RayleighQuotient {
    h: SymMatrix,
    eig: EigenDecomposition,
}

impl RayleighQuotient {
    pub fn new(h: SymMatrix) -> Result<Self> {
        if h.dim() < 2 {
            return Err(Error::InvalidArgument("Rayleigh quotient needs d >= 2".into()));
        }
        let eig = sym_eigen(&h)?;
        Ok(RayleighQuotient { h, eig })
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.h
    }

    pub fn lambda_max(&self) -> f64 {
        self.eig.max()
    }

    pub fn lambda_min(&self) -> f64 {
        self.eig.min()
    }
}

impl Objective<Sphere> for RayleighQuotient {
    fn value(&self, x: &SpherePoint) -> Result<f64> {
        let v = x.as_vector();
        check_dim(self.h.dim(), v.len())?;
        Ok(-0.5 * v.dot(&(self.h.as_matrix() * v)))
    }

    fn grad(&self, x: &SpherePoint) -> Result<DVector<f64>> {
        let v = x.as_vector();
        check_dim(self.h.dim(), v.len())?;
        let hx = self.h.as_matrix() * v;
        let q = v.dot(&hx);
        Ok(-(hx - v * q))
    }

    fn smoothness(&self) -> f64 {
        self.lambda_max() - self.lambda_min()
    }

    fn optimal_value(&self) -> Option<f64> {
        Some(-0.5 * self.lambda_max())
    }

    fn optimum(&self) -> Option<SpherePoint> {
        let d = self.h.dim();
        SpherePoint::new(self.eig.eigenvectors.column(d - 1).into_owned()).ok()
    }

    /// Distance to the nearer of `±v_max`.
    fn dist_sq_to_optimum(&self, manifold: &Sphere, x: &SpherePoint) -> Result<f64> {
        let top = self.optimum().ok_or(Error::MissingReference)?;
        let flip = SpherePoint::new(-top.as_vector())?;
        Ok(manifold.dist_sq(x, &top)?.min(manifold.dist_sq(x, &flip)?))
    }
}

/// `f(x) = ½ (x − c)ᵀ A (x − c)` on `R^d`.
#[derive(Debug, Clone)]
pub struct EuclideanQuadratic {
    a: SymMatrix,
    center: DVector<f64>,
    lambda_min: f64,
    lambda_max: f64,
}

impl EuclideanQuadratic {
    pub fn new(a: SymMatrix, center: DVector<f64>) -> Result<Self> {
        check_dim(a.dim(), center.len())?;
        let eig = sym_eigen(&a)?;
        if eig.min() < 0.0 {
            return Err(Error::InvalidArgument("quadratic must be convex".into()));
        }
        Ok(EuclideanQuadratic {
            lambda_min: eig.min(),
            lambda_max: eig.max(),
            a,
            center,
        })
    }

    /// `½ x²` in one dimension.
    pub fn unit() -> Self {
        Self::new(SymMatrix::identity(1), DVector::zeros(1)).expect("identity is convex")
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.a
    }
}

impl Objective<Euclidean> for EuclideanQuadratic {
    fn value(&self, x: &DVector<f64>) -> Result<f64> {
        check_dim(self.center.len(), x.len())?;
        let dx = x - &self.center;
        Ok(0.5 * dx.dot(&(self.a.as_matrix() * &dx)))
    }

    fn grad(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.center.len(), x.len())?;
        Ok(self.a.as_matrix() * (x - &self.center))
    }

    fn smoothness(&self) -> f64 {
        self.lambda_max
    }

    fn strong_convexity(&self) -> f64 {
        self.lambda_min
    }

    fn optimal_value(&self) -> Option<f64> {
        Some(0.0)
    }

    fn optimum(&self) -> Option<DVector<f64>> {
        Some(self.center.clone())
    }
}

/// Labelled scalar regression data.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanFieldTarget {
    /// `sin(2πx)`.
    Sine,
    /// A fixed random two-layer ReLU network of width 30.
    Teacher,
}

pub const TEACHER_WIDTH: usize = 30;

fn relu(z: f64) -> f64 {
    z.max(0.0)
}

/// `(1/m) Σ a_i relu(w_i x + b_i)` with `θ = [a_0, w_0, b_0, a_1, …]`.
pub fn two_layer_output(theta: &[f64], x: f64) -> f64 {
    let m = theta.len() / 3;
    let s: f64 = theta
        .chunks_exact(3)
        .map(|p| p[0] * relu(p[1] * x + p[2]))
        .sum();
    s / m as f64
}

/// Uniform inputs on `[−1, 1]` with targets from `target`, split 70/30 into
/// `(train, test)`. The teacher's parameters use an independent stream.
pub fn make_meanfield_data(target: MeanFieldTarget, samples: usize, seed: u64) -> (Dataset, Dataset) {
    let mut rng = ExperimentRng::with_stream(seed, 1);
    let teacher: Vec<f64> = {
        let mut t = ExperimentRng::with_stream(seed, 2);
        (0..3 * TEACHER_WIDTH).map(|_| t.gaussian()).collect()
    };
    let inputs: Vec<f64> = (0..samples).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
    let targets: Vec<f64> = inputs
        .iter()
        .map(|&x| match target {
            MeanFieldTarget::Sine => (2.0 * std::f64::consts::PI * x).sin(),
            MeanFieldTarget::Teacher => two_layer_output(&teacher, x),
        })
        .collect();
    let n_train = (samples * 7) / 10;
    let train = Dataset {
        inputs: inputs[..n_train].to_vec(),
        targets: targets[..n_train].to_vec(),
    };
    let test = Dataset {
        inputs: inputs[n_train..].to_vec(),
        targets: targets[n_train..].to_vec(),
    };
    (train, test)
}

/// Mean squared error of a width-`m` two-layer ReLU network with mean-field
/// `1/m` output scaling, as a function of the `3m` particle coordinates.
#[derive(Debug, Clone)]
pub struct MeanFieldNet {
    width: usize,
    train: Dataset,
    smoothness: f64,
}

impl MeanFieldNet {
    pub fn new(width: usize, train: Dataset, smoothness: f64) -> Result<Self> {
        if width == 0 || train.is_empty() {
            return Err(Error::InvalidArgument(
                "mean-field network needs positive width and data".into(),
            ));
        }
        Ok(MeanFieldNet {
            width,
            train,
            smoothness,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Standard normal initialization of every particle coordinate.
    pub fn init(&self, rng: &mut ExperimentRng) -> DVector<f64> {
        rng.gaussian_vector(3 * self.width)
    }

    pub fn mse(&self, theta: &DVector<f64>, data: &Dataset) -> Result<f64> {
        check_dim(3 * self.width, theta.len())?;
        let s = theta.as_slice();
        let total: f64 = data
            .inputs
            .iter()
            .zip(&data.targets)
            .map(|(&x, &y)| (two_layer_output(s, x) - y).powi(2))
            .sum();
        Ok(total / data.len() as f64)
    }
}

impl Objective<Euclidean> for MeanFieldNet {
    fn value(&self, theta: &DVector<f64>) -> Result<f64> {
        self.mse(theta, &self.train)
    }

    /// Backpropagation through `a · relu(wx + b)`, subgradient 0 at the kink.
    fn grad(&self, theta: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(3 * self.width, theta.len())?;
        let s = theta.as_slice();
        let scale = 2.0 / (self.train.len() as f64 * self.width as f64);
        let mut g = DVector::zeros(theta.len());
        for (&x, &y) in self.train.inputs.iter().zip(&self.train.targets) {
            let r = two_layer_output(s, x) - y;
            for (i, p) in s.chunks_exact(3).enumerate() {
                let z = p[1] * x + p[2];
                if z > 0.0 {
                    g[3 * i] += scale * r * z;
                    g[3 * i + 1] += scale * r * p[0] * x;
                    g[3 * i + 2] += scale * r * p[0];
                }
            }
        }
        Ok(g)
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn optimal_value(&self) -> Option<f64> {
        Some(0.0)
    }
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![hi],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == count - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (count - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Spectrum of `Σ*`: `d` log-spaced values on `[1/L, 1/α]`, endpoints exact.
pub fn sigma_star_spectrum(d: usize, l: f64, alpha: f64) -> Result<Vec<f64>> {
    if d == 0 || !(alpha > 0.0 && alpha <= l && l.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need d >= 1 and 0 < alpha <= L, got d={d}, alpha={alpha}, L={l}"
        )));
    }
    if d == 1 {
        return Ok(vec![1.0 / l]);
    }
    Ok(log_spaced(1.0 / l, 1.0 / alpha, d))
}

/// Random potential with Haar eigenbasis, log-spaced spectrum on `[1/L, 1/α]`
/// and `m*` uniform on the unit cube.
pub fn random_quadratic_potential(d: usize, l: f64, alpha: f64, seed: u64) -> Result<QuadraticPotential> {
    let spectrum = sigma_star_spectrum(d, l, alpha)?;
    let mut rng = ExperimentRng::new(seed);
    let basis = rng.haar_orthogonal(d);
    let m_star = DVector::from_fn(d, |_, _| rng.uniform());
    QuadraticPotential::from_spectrum(m_star, &basis, &spectrum)
}

/// `Σ*` of [`random_quadratic_potential`] with the same seed.
pub fn make_sigma_star(d: usize, l: f64, alpha: f64, seed: u64) -> Result<SpdMatrix> {
    Ok(random_quadratic_potential(d, l, alpha, seed)?.sigma_star().clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayleighKind {
    /// `(A + Aᵀ)/2` with i.i.d. `N(0, 1/d)` entries.
    Wigner,
    /// Haar conjugation of log-spaced eigenvalues on `[−d, −1] ∪ [1, d]`.
    Spread,
}

pub fn make_rayleigh_h(d: usize, kind: RayleighKind, seed: u64) -> Result<SymMatrix> {
    if d < 2 {
        return Err(Error::InvalidArgument("Rayleigh matrix needs d >= 2".into()));
    }
    let mut rng = ExperimentRng::new(seed);
    match kind {
        RayleighKind::Wigner => {
            let a = rng.gaussian_matrix(d, d) / (d as f64).sqrt();
            SymMatrix::new(a)
        }
        RayleighKind::Spread => {
            let top = d as f64;
            let pos = log_spaced(1.0, top, d - d / 2);
            let neg = log_spaced(1.0, top, d / 2);
            let mut values: Vec<f64> = neg.iter().map(|v| -v).collect();
            values.extend(pos);
            let q = rng.haar_orthogonal(d);
            Ok(SymMatrix::from_spectrum(&q, &values))
        }
    }
}
