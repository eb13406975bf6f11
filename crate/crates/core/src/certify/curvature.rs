//! Sectional curvatures of the Bures-Wasserstein space at `N(0, Σ)`, in the
//! orthonormal basis `e+`, `e_ij`, `f_ij` built from the eigenvectors of `Σ`.
//!
//! Indices are zero-based; `λ` holds the eigenvalues of `Σ` in ascending
//! order, so `e+` pairs the first and last eigenvectors.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvaturePair {
    /// `K(e+, f_ij)`, defined for `i = 0` or `j = d − 1`.
    EPlusFij { i: usize, j: usize },
    /// `K(e_ik, f_ij)` with `j ≠ k`.
    EikFij { i: usize, j: usize, k: usize },
    /// `K(e_ij, f_ij)`.
    EijFij { i: usize, j: usize },
    /// `K(f_ij, f_ik)` with `j ≠ k`.
    FijFik { i: usize, j: usize, k: usize },
    /// Every other basis pair; the curvature vanishes.
    Other,
}

impl fmt::Display for CurvaturePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Printed one-based, as in the usual basis notation.
        match *self {
            CurvaturePair::EPlusFij { i, j } => write!(f, "K(e+, f_{}{})", i + 1, j + 1),
            CurvaturePair::EikFij { i, j, k } => {
                write!(f, "K(e_{}{}, f_{}{})", i + 1, k + 1, i + 1, j + 1)
            }
            CurvaturePair::EijFij { i, j } => {
                write!(f, "K(e_{}{}, f_{}{})", i + 1, j + 1, i + 1, j + 1)
            }
            CurvaturePair::FijFik { i, j, k } => {
                write!(f, "K(f_{}{}, f_{}{})", i + 1, j + 1, i + 1, k + 1)
            }
            CurvaturePair::Other => write!(f, "K(other)"),
        }
    }
}

fn check_spectrum(lambdas: &[f64]) -> Result<()> {
    if let Some(bad) = lambdas.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "eigenvalues must be positive, got {bad}"
        )));
    }
    Ok(())
}

fn invalid(pair: CurvaturePair, why: &str) -> Error {
    Error::InvalidArgument(format!("{pair}: {why}"))
}

pub fn bw_sectional_curvature(lambdas: &[f64], pair: CurvaturePair) -> Result<f64> {
    check_spectrum(lambdas)?;
    let d = lambdas.len();
    let l = |i: usize| lambdas[i];
    let in_range = |idx: &[usize]| idx.iter().all(|&i| i < d);
    match pair {
        CurvaturePair::Other => Ok(0.0),
        CurvaturePair::EPlusFij { i, j } => {
            if !in_range(&[i, j]) || i == j {
                return Err(invalid(pair, "indices out of range or equal"));
            }
            if !(i == 0 || j == d - 1) {
                return Err(invalid(pair, "needs i = 1 or j = d"));
            }
            let s = l(i) + l(j);
            Ok(3.0 * l(i) * l(j) / (s * s * (l(0) + l(d - 1))))
        }
        CurvaturePair::EikFij { i, j, k } => {
            if !in_range(&[i, j, k]) || i == j || i == k || j == k {
                return Err(invalid(pair, "needs distinct in-range indices with j != k"));
            }
            let s = l(i) + l(j);
            Ok(3.0 * l(i) * l(j) / (s * s * (l(i) + l(k))))
        }
        CurvaturePair::EijFij { i, j } => {
            if !in_range(&[i, j]) || i == j {
                return Err(invalid(pair, "indices out of range or equal"));
            }
            let s = l(i) + l(j);
            Ok(12.0 * l(i) * l(j) / (s * s * s))
        }
        CurvaturePair::FijFik { i, j, k } => {
            if !in_range(&[i, j, k]) || i == j || i == k || j == k {
                return Err(invalid(pair, "needs distinct in-range indices with j != k"));
            }
            Ok(3.0 * l(j) * l(k) / ((l(i) + l(j)) * (l(j) + l(k)) * (l(i) + l(k))))
        }
    }
}

/// Every basis pair with a closed-form (generally nonzero) curvature.
pub fn curvature_table(lambdas: &[f64]) -> Result<Vec<(CurvaturePair, f64)>> {
    check_spectrum(lambdas)?;
    let d = lambdas.len();
    let mut pairs = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            if i == 0 || j == d - 1 {
                pairs.push(CurvaturePair::EPlusFij { i, j });
            }
            pairs.push(CurvaturePair::EijFij { i, j });
        }
    }
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                if i != j && i != k && j != k {
                    pairs.push(CurvaturePair::EikFij { i, j, k });
                    if j < k {
                        pairs.push(CurvaturePair::FijFik { i, j, k });
                    }
                }
            }
        }
    }
    pairs
        .into_iter()
        .map(|p| Ok((p, bw_sectional_curvature(lambdas, p)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_substitutions() {
        let k = bw_sectional_curvature(&[1.0, 1.0], CurvaturePair::EijFij { i: 0, j: 1 }).unwrap();
        assert_eq!(k, 1.5);
        for eps in [1e-1, 1e-3] {
            let k = bw_sectional_curvature(&[eps; 3], CurvaturePair::FijFik { i: 0, j: 1, k: 2 }).unwrap();
            assert!((k - 3.0 / (8.0 * eps)).abs() <= 1e-12 * k);
        }
        assert_eq!(bw_sectional_curvature(&[1.0, 2.0], CurvaturePair::Other).unwrap(), 0.0);
    }

    #[test]
    fn constraints_enforced() {
        let l = [1.0, 2.0, 3.0];
        assert!(bw_sectional_curvature(&l, CurvaturePair::EikFij { i: 0, j: 1, k: 1 }).is_err());
        assert!(bw_sectional_curvature(&l, CurvaturePair::EPlusFij { i: 1, j: 1 }).is_err());
        assert!(bw_sectional_curvature(&[1.0, 0.0], CurvaturePair::Other).is_err());
    }

    #[test]
    fn table_sizes() {
        assert!(curvature_table(&[2.0]).unwrap().is_empty());
        let t = curvature_table(&[1.0, 1.0]).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|(_, k)| *k > 0.0));
        assert_eq!(t[0].0.to_string(), "K(e+, f_12)");
    }
}
