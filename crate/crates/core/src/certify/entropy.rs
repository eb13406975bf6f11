//! Convexity of the Gaussian entropy `H(A) = −½ log det A` along the
//! interpolating curves of the Bures-Wasserstein and affine-invariant
//! geometries.

use nalgebra::DMatrix;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{log_det, spd_log, spd_sqrt_pair, sym_exp, SpdMatrix, SymMatrix};
use crate::manifolds::ot_map_matrix;

use super::CertificateReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    BuresWasserstein,
    AffineInvariant,
}

impl Geometry {
    pub fn label(self) -> &'static str {
        match self {
            Geometry::BuresWasserstein => "bw",
            Geometry::AffineInvariant => "ai",
        }
    }
}

/// Bound on grid second differences.
pub const SECOND_DIFFERENCE_TOL: f64 = 1e-7;
/// Relative bound on `|finite difference − analytic|` for the BW curve.
pub const ANALYTIC_TOL: f64 = 1e-5;

const FD_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCurveDetails {
    pub geometry: Geometry,
    pub grid: usize,
    /// `H(t−h) − 2H(t) + H(t+h)` at the interior grid nodes.
    pub second_differences: Vec<f64>,
    /// Worst `|fd − analytic| / (1 + |analytic|)` over interior nodes; BW only.
    pub analytic_mismatch: Option<f64>,
    pub worst_node: usize,
}

impl EntropyCurveDetails {
    /// Signed gap: the smallest second difference for BW, minus the largest
    /// magnitude for AI. An analytic mismatch past its own tolerance makes
    /// the gap at least as negative as the mismatch.
    pub fn worst_gap(&self) -> f64 {
        let sd = match self.geometry {
            Geometry::BuresWasserstein => self.second_differences.iter().copied().fold(f64::INFINITY, f64::min),
            Geometry::AffineInvariant => -self.second_differences.iter().fold(0.0f64, |a, v| a.max(v.abs())),
        };
        let sd = if sd.is_finite() { sd } else { 0.0 };
        match self.analytic_mismatch {
            Some(m) if !(m <= ANALYTIC_TOL) => sd.min(-m),
            _ => sd,
        }
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn entropy_of(m: &DMatrix<f64>) -> Result<f64> {
    Ok(-0.5 * log_det(&SpdMatrix::new(symmetrize(m))?)?)
}

fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().min()
}

struct BwCurve {
    m0: DMatrix<f64>,
    c: DMatrix<f64>,
    eye: DMatrix<f64>,
}

impl BwCurve {
    fn new(m0: &SpdMatrix, m1: &SpdMatrix, n: &SpdMatrix) -> Result<Self> {
        let to_n = ot_map_matrix(m0, n)?;
        let from_n = ot_map_matrix(n, m1)?;
        let d = m0.dim();
        Ok(BwCurve {
            m0: m0.as_matrix().clone(),
            c: from_n.as_matrix() * to_n.as_matrix(),
            eye: DMatrix::identity(d, d),
        })
    }

    fn a(&self, t: f64) -> DMatrix<f64> {
        &self.eye * (1.0 - t) + &self.c * t
    }

    fn entropy(&self, t: f64) -> Result<f64> {
        let a = self.a(t);
        let floor = 1e-12 * (1.0 + a.norm());
        if !(min_singular_value(&a) > floor) {
            return Err(Error::DegenerateMatrix {
                min_eigenvalue: min_singular_value(&a),
                floor,
            });
        }
        entropy_of(&(&a * &self.m0 * a.transpose()))
    }

    /// `tr((A_t⁻¹ (C − I))²)`, similar to the symmetric-root form.
    fn analytic_second_derivative(&self, t: f64) -> Result<f64> {
        let a = self.a(t);
        let inv = a.try_inverse().ok_or(Error::DegenerateMatrix {
            min_eigenvalue: 0.0,
            floor: 0.0,
        })?;
        let p = inv * (&self.c - &self.eye);
        Ok((&p * &p).trace())
    }
}

struct AiCurve {
    root: DMatrix<f64>,
    log0: DMatrix<f64>,
    log1: DMatrix<f64>,
}

impl AiCurve {
    fn new(m0: &SpdMatrix, m1: &SpdMatrix, n: &SpdMatrix) -> Result<Self> {
        let (root, inv_root) = spd_sqrt_pair(n)?;
        let whiten = |m: &SpdMatrix| -> Result<DMatrix<f64>> {
            let w = inv_root.as_matrix() * m.as_matrix() * inv_root.as_matrix();
            Ok(spd_log(&SpdMatrix::new(symmetrize(&w))?)?.into_inner())
        };
        Ok(AiCurve {
            root: root.as_matrix().clone(),
            log0: whiten(m0)?,
            log1: whiten(m1)?,
        })
    }

    fn entropy(&self, t: f64) -> Result<f64> {
        let c = &self.log0 * (1.0 - t) + &self.log1 * t;
        let e = sym_exp(&SymMatrix::new(symmetrize(&c))?)?;
        entropy_of(&(&self.root * e.as_matrix() * &self.root))
    }
}

/// Samples `H(M(t))` at `t = i / grid` and inspects its second differences.
pub fn entropy_curve_details(
    m0: &SpdMatrix,
    m1: &SpdMatrix,
    n: &SpdMatrix,
    geometry: Geometry,
    grid: usize,
) -> Result<EntropyCurveDetails> {
    check_dim(m0.dim(), m1.dim())?;
    check_dim(m0.dim(), n.dim())?;
    if grid < 2 {
        return Err(Error::InvalidArgument(format!("grid must be at least 2, got {grid}")));
    }
    let ts: Vec<f64> = (0..=grid).map(|i| i as f64 / grid as f64).collect();
    let (values, mismatch) = match geometry {
        Geometry::AffineInvariant => {
            let curve = AiCurve::new(m0, m1, n)?;
            let v = ts.iter().map(|&t| curve.entropy(t)).collect::<Result<Vec<_>>>()?;
            (v, None)
        }
        Geometry::BuresWasserstein => {
            let curve = BwCurve::new(m0, m1, n)?;
            let v = ts.iter().map(|&t| curve.entropy(t)).collect::<Result<Vec<_>>>()?;
            let mut worst = 0.0f64;
            for &t in &ts[1..grid] {
                let h = FD_STEP.min(t).min(1.0 - t) * 0.5;
                let fd = |h: f64| -> Result<f64> {
                    Ok((curve.entropy(t - h)? - 2.0 * curve.entropy(t)? + curve.entropy(t + h)?) / (h * h))
                };
                // Richardson extrapolation removes the O(h²) term.
                let est = (4.0 * fd(h * 0.5)? - fd(h)?) / 3.0;
                let an = curve.analytic_second_derivative(t)?;
                worst = worst.max((est - an).abs() / (1.0 + an.abs()));
            }
            (v, Some(worst))
        }
    };
    let second_differences: Vec<f64> = values.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect();
    let score = |v: f64| match geometry {
        Geometry::BuresWasserstein => v,
        Geometry::AffineInvariant => -v.abs(),
    };
    let worst_node = second_differences
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if score(v) < bv { (i, score(v)) } else { (bi, bv) })
        .0
        + 1;
    Ok(EntropyCurveDetails {
        geometry,
        grid,
        second_differences,
        analytic_mismatch: mismatch,
        worst_node,
    })
}

pub fn entropy_curve_check(
    m0: &SpdMatrix,
    m1: &SpdMatrix,
    n: &SpdMatrix,
    geometry: Geometry,
    grid: usize,
) -> Result<CertificateReport> {
    let details = entropy_curve_details(m0, m1, n, geometry, grid)?;
    let mut witness = format!("t = {}/{}", details.worst_node, grid);
    if let Some(m) = details.analytic_mismatch {
        witness.push_str(&format!("\nanalytic_mismatch = {m:e}"));
    }
    Ok(CertificateReport::new(
        format!("entropy_{}", geometry.label()),
        1,
        details.worst_gap(),
        SECOND_DIFFERENCE_TOL,
        witness,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::ExperimentRng;

    fn random_spd(rng: &mut ExperimentRng, d: usize) -> SpdMatrix {
        let q = rng.haar_orthogonal(d);
        let vals: Vec<f64> = (0..d).map(|_| rng.uniform_range(0.2, 5.0)).collect();
        SpdMatrix::from_spectrum(&q, &vals).unwrap()
    }

    #[test]
    fn equal_endpoints_give_flat_curve() {
        let mut rng = ExperimentRng::new(3);
        let m = random_spd(&mut rng, 3);
        let n = random_spd(&mut rng, 3);
        for g in [Geometry::BuresWasserstein, Geometry::AffineInvariant] {
            let d = entropy_curve_details(&m, &m, &n, g, 16).unwrap();
            assert!(d.second_differences.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn random_triples_pass() {
        let mut rng = ExperimentRng::new(11);
        for d in 1..=4 {
            let (m0, m1, n) = (random_spd(&mut rng, d), random_spd(&mut rng, d), random_spd(&mut rng, d));
            for g in [Geometry::BuresWasserstein, Geometry::AffineInvariant] {
                let r = entropy_curve_check(&m0, &m1, &n, g, 20).unwrap();
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn bw_curve_hits_endpoints() {
        let mut rng = ExperimentRng::new(5);
        let (m0, m1, n) = (random_spd(&mut rng, 3), random_spd(&mut rng, 3), random_spd(&mut rng, 3));
        let c = BwCurve::new(&m0, &m1, &n).unwrap();
        let end = c.c.clone() * m0.as_matrix() * c.c.transpose();
        assert!((end - m1.as_matrix()).norm() < 1e-9);
    }
}
