use nalgebra::{DMatrix, DVector};

use super::{Manifold, TangentVector};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{spd_sqrt_pair, sym_eigen, SpdMatrix, SymMatrix};

/// A non-degenerate Gaussian `N(mean, cov)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gaussian {
    pub mean: DVector<f64>,
    pub cov: SpdMatrix,
}

impl Gaussian {
    pub fn new(mean: DVector<f64>, cov: SpdMatrix) -> Result<Self> {
        check_dim(cov.dim(), mean.len())?;
        Ok(Gaussian { mean, cov })
    }

    /// `N(0, I_d)`.
    pub fn standard(d: usize) -> Self {
        Gaussian {
            mean: DVector::zeros(d),
            cov: SpdMatrix::identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Tangent vector `(a, S)`, read as the affine map `x ↦ a + S(x − m)`.
///
/// `S` is symmetric for tangents produced by `log` and gradients. Transport
/// composes with an optimal map on the right, so transported tangents carry a
/// general square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BwTangent {
    pub shift: DVector<f64>,
    pub map: DMatrix<f64>,
}

impl BwTangent {
    pub fn new(shift: DVector<f64>, map: DMatrix<f64>) -> Result<Self> {
        check_dim(shift.len(), map.nrows())?;
        check_dim(shift.len(), map.ncols())?;
        Ok(BwTangent { shift, map })
    }

    pub fn zeros(d: usize) -> Self {
        BwTangent {
            shift: DVector::zeros(d),
            map: DMatrix::zeros(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (&self.map - self.map.transpose()).amax() <= tol
    }
}

impl TangentVector for BwTangent {
    fn add(&self, other: &Self) -> Self {
        BwTangent {
            shift: &self.shift + &other.shift,
            map: &self.map + &other.map,
        }
    }
    fn sub(&self, other: &Self) -> Self {
        BwTangent {
            shift: &self.shift - &other.shift,
            map: &self.map - &other.map,
        }
    }
    fn scale(&self, factor: f64) -> Self {
        BwTangent {
            shift: &self.shift * factor,
            map: &self.map * factor,
        }
    }
}

/// Optimal transport matrix `B` with `B Σ0 B = Σ1`:
/// `B = Σ0^{-1/2} (Σ0^{1/2} Σ1 Σ0^{1/2})^{1/2} Σ0^{-1/2}`.
pub fn ot_map_matrix(sigma0: &SpdMatrix, sigma1: &SpdMatrix) -> Result<SymMatrix> {
    check_dim(sigma0.dim(), sigma1.dim())?;
    let (root, inv_root) = spd_sqrt_pair(sigma0)?;
    let r = root.as_matrix();
    let inner = SpdMatrix::new(r * sigma1.as_matrix() * r)?;
    let (mid, _) = spd_sqrt_pair(&inner)?;
    let ir = inv_root.as_matrix();
    SymMatrix::new(ir * mid.as_matrix() * ir)
}

/// `tr((Σ0^{1/2} Σ1 Σ0^{1/2})^{1/2})`, the fidelity term of the distance.
fn fidelity(sigma0: &SpdMatrix, sigma1: &SpdMatrix) -> Result<f64> {
    let (root, _) = spd_sqrt_pair(sigma0)?;
    let r = root.as_matrix();
    let inner = SymMatrix::new(r * sigma1.as_matrix() * r)?;
    let eig = sym_eigen(&inner)?;
    Ok(eig.eigenvalues.iter().map(|v| v.max(0.0).sqrt()).sum())
}

/// Smallest singular value of `F` (eigenvalue magnitude when `F` is symmetric)
/// and the largest, for the degeneracy test in `exp`.
fn factor_extremes(f: &DMatrix<f64>) -> Result<(f64, f64)> {
    if (f - f.transpose()).amax() == 0.0 {
        let eig = sym_eigen(&SymMatrix::new(f.clone())?)?;
        let abs: Vec<f64> = eig.eigenvalues.iter().map(|v| v.abs()).collect();
        let lo = abs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = abs.iter().copied().fold(0.0, f64::max);
        Ok((lo, hi))
    } else {
        let sv = f.clone().singular_values();
        Ok((sv.min(), sv.max()))
    }
}

/// Gaussians under the 2-Wasserstein metric.
///
/// By default `exp` refuses a numerically singular factor `I + S`. The
/// extended variant lets such steps through and produces rank-deficient
/// covariances, which the closed-form potential objective can still
/// evaluate; roots, logarithms and distances then fail on demand.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuresWasserstein {
    pub allow_rank_deficient: bool,
}

impl BuresWasserstein {
    pub const fn new() -> Self {
        BuresWasserstein {
            allow_rank_deficient: false,
        }
    }

    pub const fn extended() -> Self {
        BuresWasserstein {
            allow_rank_deficient: true,
        }
    }

    /// Converts Euclidean partials `(∇_m F, ∇_Σ F)` into `(∇_m F, 2 sym(∇_Σ F))`.
    pub fn riemannian_grad(
        &self,
        x: &Gaussian,
        grad_mean: &DVector<f64>,
        grad_cov: &DMatrix<f64>,
    ) -> Result<BwTangent> {
        check_dim(x.dim(), grad_mean.len())?;
        check_dim(x.dim(), grad_cov.nrows())?;
        check_dim(x.dim(), grad_cov.ncols())?;
        Ok(BwTangent {
            shift: grad_mean.clone(),
            map: grad_cov + grad_cov.transpose(),
        })
    }

    fn check(&self, x: &Gaussian, v: &BwTangent) -> Result<()> {
        check_dim(x.dim(), v.dim())?;
        check_dim(x.dim(), v.map.nrows())?;
        check_dim(x.dim(), v.map.ncols())
    }
}

impl Manifold for BuresWasserstein {
    type Point = Gaussian;
    type Tangent = BwTangent;

    fn name(&self) -> &'static str {
        "bures-wasserstein"
    }

    fn point_dim(&self, x: &Gaussian) -> usize {
        x.dim()
    }

    fn zero_tangent(&self, x: &Gaussian) -> BwTangent {
        BwTangent::zeros(x.dim())
    }

    /// `⟨a, b⟩ + tr(Sᵀ R Σ)`.
    fn inner(&self, x: &Gaussian, u: &BwTangent, v: &BwTangent) -> Result<f64> {
        self.check(x, u)?;
        self.check(x, v)?;
        let rs = &v.map * x.cov.as_matrix();
        Ok(u.shift.dot(&v.shift) + u.map.dot(&rs))
    }

    /// `(m + a, (I + S) Σ (I + S)ᵀ)`. Fails when `I + S` is numerically singular;
    /// the covariance itself is not re-validated here.
    fn exp(&self, x: &Gaussian, v: &BwTangent) -> Result<Gaussian> {
        self.check(x, v)?;
        let d = x.dim();
        let factor = &v.map + DMatrix::identity(d, d);
        if !factor.iter().all(|e| e.is_finite()) {
            return Err(Error::NumericalFailure {
                norm: factor.norm(),
            });
        }
        let (lo, hi) = factor_extremes(&factor)?;
        if !self.allow_rank_deficient && !(lo > 1e-12 * (1.0 + hi)) {
            return Err(Error::DegenerateCovariance {
                min_factor_eigenvalue: lo,
            });
        }
        Ok(Gaussian {
            mean: &x.mean + &v.shift,
            cov: SpdMatrix::congruence(&factor, &x.cov),
        })
    }

    fn log(&self, x: &Gaussian, y: &Gaussian) -> Result<BwTangent> {
        check_dim(x.dim(), y.dim())?;
        let b = ot_map_matrix(&x.cov, &y.cov)?.into_inner();
        let d = x.dim();
        Ok(BwTangent {
            shift: &y.mean - &x.mean,
            map: b - DMatrix::identity(d, d),
        })
    }

    /// `(a, S · B(Σ_y → Σ_x))`.
    fn transport(&self, x: &Gaussian, y: &Gaussian, v: &BwTangent) -> Result<BwTangent> {
        self.check(x, v)?;
        check_dim(x.dim(), y.dim())?;
        let back = ot_map_matrix(&y.cov, &x.cov)?;
        Ok(BwTangent {
            shift: v.shift.clone(),
            map: &v.map * back.as_matrix(),
        })
    }

    fn coordinate_gap(&self, x: &Gaussian, y: &Gaussian) -> f64 {
        (&x.mean - &y.mean).norm() + (x.cov.as_matrix() - y.cov.as_matrix()).norm()
    }

    fn dist_sq(&self, x: &Gaussian, y: &Gaussian) -> Result<f64> {
        check_dim(x.dim(), y.dim())?;
        let f = fidelity(&x.cov, &y.cov)?;
        let d2 = (&x.mean - &y.mean).norm_squared() + x.cov.trace() + y.cov.trace() - 2.0 * f;
        Ok(d2.max(0.0))
    }
}
