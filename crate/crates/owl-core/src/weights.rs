//! Weighted row norms, `l_{W,p}` mixed norms, and the W-metric proximal
//! operator of the weighted group norm.

use nalgebra::DVector;

use crate::error::{OwlError, Result};
use crate::matrix::{validate_finite, DenseMatrix};

/// A symmetric positive definite weight `W` together with its cached inverse
/// `M = W^{-1}` (the matrix that was factorized to produce `W`).
#[derive(Debug, Clone)]
pub struct WeightMatrix {
    w: DenseMatrix,
    minv: DenseMatrix,
}

impl WeightMatrix {
    /// Builds `W = M^{-1}` from a symmetric positive definite `M` via its
    /// Cholesky factorization.
    pub fn from_spd(m: DenseMatrix) -> Result<Self> {
        validate_finite("weight matrix", &m)?;
        if m.nrows() != m.ncols() {
            return Err(OwlError::DimensionMismatch {
                context: "weight matrix must be square",
                expected: format!("{0}x{0}", m.nrows()),
                got: format!("{}x{}", m.nrows(), m.ncols()),
            });
        }
        let chol = m.clone().cholesky().ok_or(OwlError::RankDeficient {
            cond: f64::INFINITY,
        })?;
        let mut w = chol.inverse();
        // Symmetrize against rounding in the triangular solves.
        w = (&w + w.transpose()) * 0.5;
        Ok(Self { w, minv: m })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            w: DenseMatrix::identity(dim, dim),
            minv: DenseMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn w(&self) -> &DenseMatrix {
        &self.w
    }

    /// The cached inverse `W^{-1}`.
    pub fn minv(&self) -> &DenseMatrix {
        &self.minv
    }
}

/// Quadratic form `z_row * S * z_row^T` for row `row` of `z`.
pub(crate) fn quad_form_row(z: &DenseMatrix, row: usize, s: &DenseMatrix) -> f64 {
    let k = z.ncols();
    let mut acc = 0.0;
    for j in 0..k {
        let zj = z[(row, j)];
        if zj == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for i in 0..k {
            inner += z[(row, i)] * s[(i, j)];
        }
        acc += inner * zj;
    }
    acc
}

/// `sqrt(z^T W z)`, the W-(semi-)norm of a vector.
pub fn weighted_row_norm(z: &DVector<f64>, weight: &WeightMatrix) -> Result<f64> {
    if z.len() != weight.dim() {
        return Err(OwlError::DimensionMismatch {
            context: "weighted_row_norm",
            expected: format!("{}", weight.dim()),
            got: format!("{}", z.len()),
        });
    }
    let q = (z.transpose() * weight.w() * z)[(0, 0)];
    Ok(q.max(0.0).sqrt())
}

/// Aggregation exponent for the `l_{W,p}` norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwpOrder {
    One,
    Two,
    Inf,
}

/// `l_{W,p}(Z)`: p-aggregation of the per-row W-norms. For `p = 2` this
/// equals `sqrt(tr(Z W Z^T))`; for `p = inf` the sum is replaced by a max.
pub fn lwp_norm(z: &DenseMatrix, weight: &WeightMatrix, p: LwpOrder) -> Result<f64> {
    if z.ncols() != weight.dim() {
        return Err(OwlError::DimensionMismatch {
            context: "lwp_norm",
            expected: format!("{} columns", weight.dim()),
            got: format!("{} columns", z.ncols()),
        });
    }
    let norms = (0..z.nrows()).map(|n| quad_form_row(z, n, weight.w()).max(0.0).sqrt());
    Ok(match p {
        LwpOrder::One => norms.sum(),
        LwpOrder::Two => norms.map(|v| v * v).sum::<f64>().sqrt(),
        LwpOrder::Inf => norms.fold(0.0, f64::max),
    })
}

/// Proximal operator of `sigma * ||.||_{W,1}` in the W-metric: row `n` of the
/// result is `z_n * max{0, 1 - sigma / ||z_n||_W}`. Rows with W-norm at or
/// below `sigma` become exactly zero.
pub fn prox_w(z: &DenseMatrix, weight: &WeightMatrix, sigma: f64) -> Result<DenseMatrix> {
    if !(sigma > 0.0) {
        return Err(OwlError::InvalidInput(format!(
            "prox_w requires sigma > 0, got {sigma}"
        )));
    }
    if z.ncols() != weight.dim() {
        return Err(OwlError::DimensionMismatch {
            context: "prox_w",
            expected: format!("{} columns", weight.dim()),
            got: format!("{} columns", z.ncols()),
        });
    }
    let mut out = z.clone();
    for n in 0..z.nrows() {
        let norm = quad_form_row(z, n, weight.w()).max(0.0).sqrt();
        let factor = if norm > sigma { 1.0 - sigma / norm } else { 0.0 };
        if factor == 0.0 {
            out.row_mut(n).fill(0.0);
        } else {
            out.row_mut(n).scale_mut(factor);
        }
    }
    Ok(out)
}
