use nalgebra::DVector;

use super::Manifold;
use crate::error::{check_dim, Result};

/// Flat `R^d`: `exp_x(v) = x + v`, `log_x(y) = y − x`, transport is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl Euclidean {
    pub fn riemannian_grad(&self, _x: &DVector<f64>, ambient: &DVector<f64>) -> DVector<f64> {
        ambient.clone()
    }
}

impl Manifold for Euclidean {
    type Point = DVector<f64>;
    type Tangent = DVector<f64>;

    fn name(&self) -> &'static str {
        "euclidean"
    }

    fn point_dim(&self, x: &DVector<f64>) -> usize {
        x.len()
    }

    fn zero_tangent(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(x.len())
    }

    fn inner(&self, x: &DVector<f64>, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        check_dim(x.len(), u.len())?;
        check_dim(x.len(), v.len())?;
        Ok(u.dot(v))
    }

    fn exp(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(x.len(), v.len())?;
        Ok(x + v)
    }

    fn log(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(x.len(), y.len())?;
        Ok(y - x)
    }

    fn transport(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        v: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        check_dim(x.len(), y.len())?;
        check_dim(x.len(), v.len())?;
        Ok(v.clone())
    }

    fn coordinate_gap(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x - y).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_operations() {
        let m = Euclidean;
        let x = DVector::from_vec(vec![1.0, 2.0]);
        let y = DVector::from_vec(vec![-1.0, 0.5]);
        let v = m.log(&x, &y).unwrap();
        assert_eq!(m.exp(&x, &v).unwrap(), y);
        assert_eq!(m.transport(&x, &y, &v).unwrap(), v);
        assert!((m.dist(&x, &y).unwrap() - (4.0f64 + 2.25).sqrt()).abs() < 1e-15);
        assert_eq!(m.inner(&x, &v, &m.zero_tangent(&x)).unwrap(), 0.0);
        assert!(m.inner(&x, &v, &DVector::zeros(3)).is_err());
    }
}
