//! Riemannian gradient descent with silver step sizes on non-negatively
//! curved manifolds.
//!
//! The crate covers the step-size schedules, three manifold backends
//! (Euclidean, unit sphere, Bures-Wasserstein Gaussians), the objectives used
//! in the experiments, a trajectory-recording optimizer, numerical
//! certificates for the convergence inequalities, and a config-driven
//! experiment runner.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod manifolds;
pub mod objectives;
pub mod optimizer;
pub mod rng;
pub mod schedules;

pub use error::{Error, Result};
