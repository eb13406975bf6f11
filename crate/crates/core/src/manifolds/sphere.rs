use nalgebra::DVector;

use super::Manifold;
use crate::error::{check_dim, Error, Result};

/// Below this tangent norm the sin/cos ratios switch to Taylor expansions.
pub const SMALL_ANGLE: f64 = 1e-9;

/// Pairs whose angle exceeds `π − ANTIPODAL_MARGIN` have no usable logarithm.
pub const ANTIPODAL_MARGIN: f64 = 1e-6;

/// A unit vector. Renormalized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint(DVector<f64>);

impl SpherePoint {
    pub fn new(v: DVector<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidArgument(
                "sphere point must be a finite nonzero vector".into(),
            ));
        }
        Ok(SpherePoint(v / n))
    }

    /// The `i`-th standard basis vector of `R^d`.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        SpherePoint(v)
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// `sin(t)/t`, accurate near zero.
fn sinc(t: f64) -> f64 {
    if t.abs() < SMALL_ANGLE {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// Unit sphere `S^{d−1} ⊂ R^d` with the round metric.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sphere;

impl Sphere {
    /// Tangent projection `(I − xxᵀ)g`.
    pub fn riemannian_grad(&self, x: &SpherePoint, ambient: &DVector<f64>) -> DVector<f64> {
        let x = x.as_vector();
        ambient - x * x.dot(ambient)
    }

    /// Angle between two points, computed as `atan2(|y − ⟨x,y⟩x|, ⟨x,y⟩)`.
    fn angle(x: &DVector<f64>, y: &DVector<f64>) -> (f64, DVector<f64>) {
        let c = x.dot(y).clamp(-1.0, 1.0);
        let w = y - x * c;
        (w.norm().atan2(c), w)
    }
}

impl Manifold for Sphere {
    type Point = SpherePoint;
    type Tangent = DVector<f64>;

    fn name(&self) -> &'static str {
        "sphere"
    }

    fn point_dim(&self, x: &SpherePoint) -> usize {
        x.dim()
    }

    fn zero_tangent(&self, x: &SpherePoint) -> DVector<f64> {
        DVector::zeros(x.dim())
    }

    fn inner(&self, x: &SpherePoint, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        check_dim(x.dim(), u.len())?;
        check_dim(x.dim(), v.len())?;
        Ok(u.dot(v))
    }

    fn exp(&self, x: &SpherePoint, v: &DVector<f64>) -> Result<SpherePoint> {
        check_dim(x.dim(), v.len())?;
        let t = v.norm();
        let cos = if t < SMALL_ANGLE { 1.0 - 0.5 * t * t } else { t.cos() };
        let y = x.as_vector() * cos + v * sinc(t);
        SpherePoint::new(y)
    }

    fn log(&self, x: &SpherePoint, y: &SpherePoint) -> Result<DVector<f64>> {
        check_dim(x.dim(), y.dim())?;
        let (theta, w) = Self::angle(x.as_vector(), y.as_vector());
        if theta > std::f64::consts::PI - ANTIPODAL_MARGIN {
            return Err(Error::UndefinedLog { angle: theta });
        }
        Ok(w / sinc(theta))
    }

    fn transport(
        &self,
        x: &SpherePoint,
        y: &SpherePoint,
        v: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        check_dim(x.dim(), v.len())?;
        let u = self.log(x, y)?;
        let theta = u.norm();
        if theta == 0.0 {
            return Ok(v.clone());
        }
        // Rotate the component along the geodesic direction; fix the rest.
        let e = u / theta;
        let a = e.dot(v);
        Ok(v + (e * (theta.cos() - 1.0) - x.as_vector() * theta.sin()) * a)
    }

    fn coordinate_gap(&self, x: &SpherePoint, y: &SpherePoint) -> f64 {
        (x.as_vector() - y.as_vector()).norm()
    }

    fn dist_sq(&self, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
        let (theta, _) = Self::angle(x.as_vector(), y.as_vector());
        Ok(theta * theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn e(d: usize, i: usize) -> SpherePoint {
        SpherePoint::basis(d, i)
    }

    #[test]
    fn quarter_circle() {
        let s = Sphere;
        let v = e(3, 1).as_vector() * FRAC_PI_2;
        let y = s.exp(&e(3, 0), &v).unwrap();
        assert!((y.as_vector() - e(3, 1).as_vector()).norm() < 1e-15);
        let l = s.log(&e(3, 0), &e(3, 1)).unwrap();
        assert!((l - &v).norm() < 1e-15);
        assert!((s.dist(&e(3, 0), &e(3, 1)).unwrap() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn transport_reverses_log() {
        let s = Sphere;
        let v = e(3, 1).as_vector() * FRAC_PI_2;
        let t = s.transport(&e(3, 0), &e(3, 1), &v).unwrap();
        assert!((t + e(3, 0).as_vector() * FRAC_PI_2).norm() < 1e-15);
    }

    #[test]
    fn zero_and_orthogonal() {
        let s = Sphere;
        let x = e(4, 0);
        assert_eq!(s.exp(&x, &s.zero_tangent(&x)).unwrap(), x);
        assert_eq!(s.log(&x, &x).unwrap().norm(), 0.0);
        let u = e(4, 1).as_vector().clone();
        let w = e(4, 2).as_vector().clone();
        assert_eq!(s.inner(&x, &u, &w).unwrap(), 0.0);
    }

    #[test]
    fn antipodal_log_fails() {
        let s = Sphere;
        let x = e(3, 0);
        let y = SpherePoint::new(-x.as_vector()).unwrap();
        assert!(matches!(s.log(&x, &y), Err(Error::UndefinedLog { .. })));
        let near = SpherePoint::new(DVector::from_vec(vec![-1.0, 1e-8, 0.0])).unwrap();
        assert!(s.log(&x, &near).is_err());
        assert!(s.transport(&x, &near, &e(3, 2).as_vector().clone()).is_err());
    }

    #[test]
    fn tiny_tangent_taylor() {
        let s = Sphere;
        let x = e(3, 0);
        let v = DVector::from_vec(vec![0.0, 1e-12, 0.0]);
        let y = s.exp(&x, &v).unwrap();
        let back = s.log(&x, &y).unwrap();
        assert!((back - v).norm() < 1e-20);
    }

    #[test]
    fn gradient_projection() {
        let s = Sphere;
        let x = e(3, 0);
        let g = x.as_vector() * 3.0;
        assert_eq!(s.riemannian_grad(&x, &g).norm(), 0.0);
        let g = e(3, 1).as_vector().clone();
        assert_eq!(s.riemannian_grad(&x, &g), g);
    }
}
