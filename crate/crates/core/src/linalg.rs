//! Dense symmetric and SPD matrix kernels.
//!
//! Every constructor symmetrizes its input as `(M + Mᵀ)/2`. SPD operations
//! that factor a matrix (square roots, inverse, log-determinant) refuse
//! matrices whose smallest eigenvalue is at or below [`spd_floor`].
//!
//! The eigensolver is nalgebra's symmetric tridiagonalization followed by
//! implicit shifted QR, capped at 64 sweeps per eigenvalue.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Sweeps allowed per eigenvalue before the solver reports failure.
pub const EIGEN_ITERATIONS_PER_VALUE: usize = 64;

/// Relative eigenvalue floor `1e-12 · (1 + tr(M)/d)`.
pub fn spd_floor(m: &DMatrix<f64>) -> f64 {
    let d = m.nrows().max(1) as f64;
    1e-12 * (1.0 + m.trace() / d)
}

fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// A finite, exactly symmetric square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        Ok(SymMatrix(symmetrized(&m)))
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix(DMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Builds `Q · diag(values) · Qᵀ`.
    pub fn from_spectrum(basis: &DMatrix<f64>, values: &[f64]) -> Self {
        let scaled = basis * DMatrix::from_diagonal(&DVector::from_column_slice(values));
        SymMatrix(symmetrized(&(scaled * basis.transpose())))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

/// A symmetric positive-definite matrix.
///
/// Values built through [`SpdMatrix::new`] have a verified smallest eigenvalue
/// above the floor. Covariances produced by congruence with a nonsingular
/// factor (the Bures-Wasserstein exponential map) are SPD in exact arithmetic
/// and are checked lazily, by the operations that factor them.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    sym: SymMatrix,
    min_eigenvalue: Option<f64>,
}

impl SpdMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        Self::from_sym(SymMatrix::new(m)?)
    }

    pub fn from_sym(sym: SymMatrix) -> Result<Self> {
        let eig = sym_eigen(&sym)?;
        let min = eig.min();
        let floor = spd_floor(sym.as_matrix());
        if !(min > floor) {
            return Err(Error::DegenerateMatrix {
                min_eigenvalue: min,
                floor,
            });
        }
        Ok(SpdMatrix {
            sym,
            min_eigenvalue: Some(min),
        })
    }

    pub fn identity(dim: usize) -> Self {
        SpdMatrix {
            sym: SymMatrix::identity(dim),
            min_eigenvalue: Some(1.0),
        }
    }

    pub fn scaled_identity(dim: usize, scale: f64) -> Result<Self> {
        Self::from_sym(SymMatrix(DMatrix::identity(dim, dim) * scale))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_sym(SymMatrix::from_diagonal(diag))
    }

    /// `Q · diag(values) · Qᵀ` for an orthogonal `Q` and a known positive
    /// spectrum. The spectrum is trusted, so wide condition numbers whose
    /// smallest eigenvalue sits under the relative floor are still accepted.
    pub fn from_spectrum(basis: &DMatrix<f64>, values: &[f64]) -> Result<Self> {
        if basis.nrows() != values.len() || basis.ncols() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: values.len(),
                found: basis.ncols(),
            });
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateMatrix {
                min_eigenvalue: min,
                floor: 0.0,
            });
        }
        Ok(SpdMatrix {
            sym: SymMatrix::from_spectrum(basis, values),
            min_eigenvalue: Some(min),
        })
    }

    /// `F · base · Fᵀ`, symmetrized. The caller guarantees `F` is nonsingular.
    pub(crate) fn congruence(factor: &DMatrix<f64>, base: &SpdMatrix) -> Self {
        let product = factor * base.as_matrix() * factor.transpose();
        SpdMatrix {
            sym: SymMatrix(symmetrized(&product)),
            min_eigenvalue: None,
        }
    }

    pub(crate) fn from_trusted(m: DMatrix<f64>) -> Self {
        SpdMatrix {
            sym: SymMatrix(symmetrized(&m)),
            min_eigenvalue: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.sym.dim()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        self.sym.as_matrix()
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.sym
    }

    pub fn trace(&self) -> f64 {
        self.sym.trace()
    }

    pub fn floor(&self) -> f64 {
        spd_floor(self.as_matrix())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        match self.min_eigenvalue {
            Some(v) => Ok(v),
            None => Ok(sym_eigen(&self.sym)?.min()),
        }
    }

    /// Eigendecomposition with the floor enforced.
    pub fn checked_eigen(&self) -> Result<EigenDecomposition> {
        let eig = sym_eigen(&self.sym)?;
        let min = eig.min();
        let floor = self.floor();
        if !(min > floor) {
            return Err(Error::DegenerateMatrix {
                min_eigenvalue: min,
                floor,
            });
        }
        Ok(eig)
    }
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending, eigenvectors as
/// the columns of an orthogonal matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Q · diag(f(λ)) · Qᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let fj = f(lam);
            scaled.column_mut(j).scale_mut(fj);
        }
        symmetrized(&(scaled * q.transpose()))
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.map(|x| x)
    }
}

pub fn sym_eigen(m: &SymMatrix) -> Result<EigenDecomposition> {
    let d = m.dim();
    if d == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: DVector::zeros(0),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }
    let cap = EIGEN_ITERATIONS_PER_VALUE * d;
    let eig = SymmetricEigen::try_new(m.as_matrix().clone(), f64::EPSILON, cap).ok_or_else(|| {
        Error::NumericalFailure {
            norm: m.as_matrix().norm(),
        }
    })?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(d, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = DMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Principal square root.
pub fn spd_sqrt(m: &SpdMatrix) -> Result<SpdMatrix> {
    let eig = m.checked_eigen()?;
    Ok(SpdMatrix::from_trusted(eig.map(f64::sqrt)))
}

/// Inverse of the principal square root.
pub fn spd_inv_sqrt(m: &SpdMatrix) -> Result<SpdMatrix> {
    let eig = m.checked_eigen()?;
    Ok(SpdMatrix::from_trusted(eig.map(|x| 1.0 / x.sqrt())))
}

pub fn spd_inverse(m: &SpdMatrix) -> Result<SpdMatrix> {
    let eig = m.checked_eigen()?;
    Ok(SpdMatrix::from_trusted(eig.map(|x| 1.0 / x)))
}

/// Square root and inverse square root from one decomposition.
pub fn spd_sqrt_pair(m: &SpdMatrix) -> Result<(SpdMatrix, SpdMatrix)> {
    let eig = m.checked_eigen()?;
    Ok((
        SpdMatrix::from_trusted(eig.map(f64::sqrt)),
        SpdMatrix::from_trusted(eig.map(|x| 1.0 / x.sqrt())),
    ))
}

pub fn log_det(m: &SpdMatrix) -> Result<f64> {
    let eig = m.checked_eigen()?;
    Ok(eig.eigenvalues.iter().map(|v| v.ln()).sum())
}

/// Matrix logarithm of an SPD matrix (symmetric result).
pub fn spd_log(m: &SpdMatrix) -> Result<SymMatrix> {
    let eig = m.checked_eigen()?;
    Ok(SymMatrix(eig.map(f64::ln)))
}

/// Matrix exponential of a symmetric matrix.
pub fn sym_exp(m: &SymMatrix) -> Result<SpdMatrix> {
    let eig = sym_eigen(m)?;
    Ok(SpdMatrix::from_trusted(eig.map(f64::exp)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::ExperimentRng;

    fn random_sym(rng: &mut ExperimentRng, d: usize) -> SymMatrix {
        let g = rng.gaussian_matrix(d, d);
        SymMatrix::new(g).unwrap()
    }

    fn random_spd(rng: &mut ExperimentRng, d: usize) -> SpdMatrix {
        let q = rng.haar_orthogonal(d);
        let vals: Vec<f64> = (0..d).map(|_| 0.1 + 4.0 * rng.uniform()).collect();
        SpdMatrix::from_sym(SymMatrix::from_spectrum(&q, &vals)).unwrap()
    }

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = sym_eigen(&SymMatrix::identity(3)).unwrap();
        for v in eig.eigenvalues.iter() {
            assert!((v - 1.0).abs() < 1e-15);
        }
        let qtq = eig.eigenvectors.transpose() * &eig.eigenvectors;
        assert!((qtq - DMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let eig = sym_eigen(&SymMatrix::from_diagonal(&[9.0, 4.0])).unwrap();
        assert_eq!(eig.eigenvalues.as_slice(), &[4.0, 9.0]);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ExperimentRng::new(11);
        for _ in 0..20 {
            let m = random_sym(&mut rng, 8);
            let eig = sym_eigen(&m).unwrap();
            let err = max_abs(&(eig.reconstruct() - m.as_matrix()));
            assert!(err <= 1e-10 * (1.0 + max_abs(m.as_matrix())), "{err}");
            let qtq = eig.eigenvectors.transpose() * &eig.eigenvectors;
            assert!(max_abs(&(qtq - DMatrix::identity(8, 8))) < 1e-10);
            assert!(eig.eigenvalues.as_slice().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn constructor_symmetrizes() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 4.0, 1.0]);
        let s = SymMatrix::new(m).unwrap();
        assert_eq!(s.as_matrix()[(0, 1)], 3.0);
        assert_eq!(s.as_matrix()[(1, 0)], 3.0);
        assert!(SymMatrix::new(DMatrix::from_element(1, 1, f64::NAN)).is_err());
    }

    #[test]
    fn sqrt_examples() {
        let r = spd_sqrt(&SpdMatrix::identity(4)).unwrap();
        assert!((r.as_matrix() - DMatrix::identity(4, 4)).norm() < 1e-15);
        let r = spd_sqrt(&SpdMatrix::from_diagonal(&[4.0, 9.0]).unwrap()).unwrap();
        assert!((r.as_matrix()[(0, 0)] - 2.0).abs() < 1e-15);
        assert!((r.as_matrix()[(1, 1)] - 3.0).abs() < 1e-15);
        let r = spd_inv_sqrt(&SpdMatrix::from_diagonal(&[4.0]).unwrap()).unwrap();
        assert!((r.as_matrix()[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn square_then_root() {
        let mut rng = ExperimentRng::new(5);
        for _ in 0..50 {
            let d = 1 + (rng.uniform() * 10.0) as usize;
            let a = random_spd(&mut rng, d);
            let aa = SpdMatrix::new(a.as_matrix() * a.as_matrix()).unwrap();
            let root = spd_sqrt(&aa).unwrap();
            let err = (root.as_matrix() - a.as_matrix()).norm() / a.as_matrix().norm();
            assert!(err < 1e-9, "{err}");
        }
    }

    #[test]
    fn inverse_sqrt_sandwich() {
        let mut rng = ExperimentRng::new(6);
        for _ in 0..50 {
            let d = 1 + (rng.uniform() * 10.0) as usize;
            let a = random_spd(&mut rng, d);
            let r = spd_inv_sqrt(&a).unwrap();
            let s = r.as_matrix() * a.as_matrix() * r.as_matrix();
            assert!((s - DMatrix::identity(d, d)).norm() < 1e-9);
        }
    }

    #[test]
    fn log_det_examples() {
        assert_eq!(log_det(&SpdMatrix::identity(3)).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let v = log_det(&SpdMatrix::from_diagonal(&[e, e]).unwrap()).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        let mut rng = ExperimentRng::new(7);
        let a = random_spd(&mut rng, 6);
        let prod: f64 = sym_eigen(a.as_sym()).unwrap().eigenvalues.iter().product();
        assert!((log_det(&a).unwrap() - prod.ln()).abs() < 1e-10);
    }

    #[test]
    fn degenerate_input_rejected() {
        let err = SpdMatrix::from_diagonal(&[1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::DegenerateMatrix { .. }));
        let z = SpdMatrix::from_trusted(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-14])));
        assert!(matches!(spd_sqrt(&z), Err(Error::DegenerateMatrix { .. })));
        assert!(matches!(log_det(&z), Err(Error::DegenerateMatrix { .. })));
    }
}
