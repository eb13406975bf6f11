//! Multiplier matrices `λ^{(k)}` for the weighted sum of `Q_ij` certificates.
//!
//! Rows and columns run over the iterates `0..=n` (`n = 2^k − 1`) followed by
//! the reference point `*`, stored last.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::schedules::{rate_r, silver_step, RHO};

pub const MAX_LAMBDA_LEVEL: u32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMatrix {
    level: u32,
    data: DMatrix<f64>,
}

impl LambdaMatrix {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Last iterate index `n = 2^k − 1`.
    pub fn n(&self) -> usize {
        (1usize << self.level) - 1
    }

    /// Index of `*`.
    pub fn star(&self) -> usize {
        self.n() + 1
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn min_entry(&self) -> f64 {
        self.data.min()
    }
}

fn base() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[
            0.0,
            RHO,
            0.0,
            1.0,
            0.0,
            RHO - 1.0,
            RHO - 1.0,
            0.5 / rate_r(1),
            0.0,
        ],
    )
}

/// One doubling step from level `k` to `k + 1`.
fn double(prev: &DMatrix<f64>, k: u32) -> DMatrix<f64> {
    let n = prev.nrows() - 2;
    let size = 2 * n + 3;
    let star = size - 1;
    let weight = 1.0 + 2.0 * RHO;
    // Old index `i` in the upper block stays `i`, `*` moves to the new `*`;
    // in the lower block `i` shifts to `i + n + 1` and `*` again maps to `*`.
    let upper = |i: usize| if i == n + 1 { star } else { i };
    let lower = |i: usize| if i == n + 1 { star } else { i + n + 1 };
    let mut out = DMatrix::zeros(size, size);
    for i in 0..=n + 1 {
        for j in 0..=n + 1 {
            out[(upper(i), upper(j))] += prev[(i, j)];
            out[(lower(i), lower(j))] += weight * prev[(i, j)];
        }
    }
    for j in n + 1..=2 * n {
        out[(star, j)] -= 2.0 * RHO * silver_step(j as u64);
    }
    let a_k = 0.5 / rate_r(k);
    let a_next = 0.5 / rate_r(k + 1);
    out[(star, n)] += 1.0 + RHO.powi(k as i32 - 1) - a_k;
    out[(star, 2 * n + 1)] += a_next - weight * a_k;
    out
}

/// `λ^{(k)}` for `1 ≤ k ≤ 12`.
pub fn lambda_recursion(k: u32) -> Result<LambdaMatrix> {
    if k == 0 || k > MAX_LAMBDA_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "coefficient level must be in 1..={MAX_LAMBDA_LEVEL}, got {k}"
        )));
    }
    let mut data = base();
    for level in 1..k {
        data = double(&data, level);
    }
    Ok(LambdaMatrix { level: k, data })
}
