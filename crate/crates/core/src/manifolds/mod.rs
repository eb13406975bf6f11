//! Riemannian manifolds with closed-form exponential, logarithm and
//! parallel transport.
//!
//! Three backends share the [`Manifold`] interface: flat [`Euclidean`]
//! space, the unit [`Sphere`], and the Bures-Wasserstein space of
//! non-degenerate Gaussians ([`BuresWasserstein`]). All three are
//! non-negatively curved, which is what the silver step-size analysis needs.

use std::fmt::Debug;

use nalgebra::DVector;

use crate::error::Result;

mod bures_wasserstein;
mod euclidean;
mod sphere;

pub use bures_wasserstein::{ot_map_matrix, BuresWasserstein, BwTangent, Gaussian};
pub use euclidean::Euclidean;
pub use sphere::{Sphere, SpherePoint, ANTIPODAL_MARGIN, SMALL_ANGLE};

/// Linear structure of a tangent space.
pub trait TangentVector: Clone + Debug + Send + Sync {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scale(&self, factor: f64) -> Self;
}

impl TangentVector for DVector<f64> {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, factor: f64) -> Self {
        self * factor
    }
}

pub trait Manifold: Send + Sync {
    type Point: Clone + Debug + Send + Sync;
    type Tangent: TangentVector;

    fn name(&self) -> &'static str;

    /// Ambient coordinate dimension of a point.
    fn point_dim(&self, x: &Self::Point) -> usize;

    fn zero_tangent(&self, x: &Self::Point) -> Self::Tangent;

    /// Riemannian metric at `x`.
    fn inner(&self, x: &Self::Point, u: &Self::Tangent, v: &Self::Tangent) -> Result<f64>;

    fn exp(&self, x: &Self::Point, v: &Self::Tangent) -> Result<Self::Point>;

    fn log(&self, x: &Self::Point, y: &Self::Point) -> Result<Self::Tangent>;

    /// Parallel transport of `v` from `T_x` to `T_y` along the minimizing geodesic.
    fn transport(&self, x: &Self::Point, y: &Self::Point, v: &Self::Tangent)
        -> Result<Self::Tangent>;

    /// Coordinate discrepancy between two points, used by round-trip checks.
    fn coordinate_gap(&self, x: &Self::Point, y: &Self::Point) -> f64;

    fn norm_sq(&self, x: &Self::Point, v: &Self::Tangent) -> Result<f64> {
        self.inner(x, v, v)
    }

    fn dist_sq(&self, x: &Self::Point, y: &Self::Point) -> Result<f64> {
        let v = self.log(x, y)?;
        Ok(self.norm_sq(x, &v)?.max(0.0))
    }

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> Result<f64> {
        Ok(self.dist_sq(x, y)?.sqrt())
    }
}
