//! Compact SVD, pseudo-inverse square roots, and singular-value calculus.

use nalgebra::{DMatrix, DVector};

use crate::error::{OwlError, Result};
use crate::matrix::{validate_finite, DenseMatrix};

/// Default relative tolerance for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Truncated factorization `Z = U * diag(sigma) * Vt` keeping only singular
/// values above the rank tolerance. `r` may be zero for the zero matrix, in
/// which case the factors are empty.
#[derive(Debug, Clone)]
pub struct CompactSvd {
    /// N x r, orthonormal columns.
    pub u: DenseMatrix,
    /// Length r, strictly descending, all positive.
    pub sigma: DVector<f64>,
    /// r x K, orthonormal rows.
    pub vt: DenseMatrix,
}

impl CompactSvd {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma_max(&self) -> f64 {
        if self.sigma.is_empty() {
            0.0
        } else {
            self.sigma[0]
        }
    }

    /// `U * diag(sigma) * Vt`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let (n, k) = (self.u.nrows(), self.vt.ncols());
        if self.rank() == 0 {
            return DenseMatrix::zeros(n, k);
        }
        let mut us = self.u.clone();
        for (j, mut col) in us.column_iter_mut().enumerate() {
            col *= self.sigma[j];
        }
        us * &self.vt
    }
}

/// Compact SVD with singular values `sigma_i > rank_tol * sigma_max` retained,
/// sorted descending. Sign conventions of `U`, `V` follow the backend and are
/// not normalized.
pub fn compact_svd(z: &DenseMatrix, rank_tol: f64) -> Result<CompactSvd> {
    validate_finite("SVD input", z)?;
    if rank_tol < 0.0 {
        return Err(OwlError::InvalidInput("rank_tol must be >= 0".into()));
    }
    let svd = z.clone().svd(true, true);
    let u_full = svd.u.expect("requested U");
    let vt_full = svd.v_t.expect("requested V^T");
    let sv = svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap());
    let sigma_max = if sv.is_empty() { 0.0 } else { sv[order[0]] };
    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&i| sv[i] > rank_tol * sigma_max && sv[i] > 0.0)
        .collect();

    let r = keep.len();
    let mut u = DMatrix::zeros(z.nrows(), r);
    let mut vt = DMatrix::zeros(r, z.ncols());
    let mut sigma = DVector::zeros(r);
    for (slot, &i) in keep.iter().enumerate() {
        u.set_column(slot, &u_full.column(i));
        vt.set_row(slot, &vt_full.row(i));
        sigma[slot] = sv[i];
    }
    Ok(CompactSvd { u, sigma, vt })
}

/// Rank of `z` counting singular values above `rank_tol * sigma_max`.
pub fn numerical_rank(z: &DenseMatrix, rank_tol: f64) -> Result<usize> {
    Ok(compact_svd(z, rank_tol)?.rank())
}

/// `S^{dagger/2}` for a symmetric positive semidefinite `S`: eigenvalues at or
/// below `rank_tol * lambda_max` are treated as exactly zero, the rest are
/// mapped to `1/sqrt(lambda)`.
pub fn pinv_sqrt(s: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    validate_finite("pinv_sqrt input", s)?;
    if s.nrows() != s.ncols() {
        return Err(OwlError::DimensionMismatch {
            context: "pinv_sqrt expects a square matrix",
            expected: format!("{0}x{0}", s.nrows()),
            got: format!("{}x{}", s.nrows(), s.ncols()),
        });
    }
    let scale = s.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let asym = (s - s.transpose()).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if asym > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(OwlError::InvalidInput(
            "pinv_sqrt input is not symmetric within tolerance".into(),
        ));
    }
    let sym = (s + s.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let lam_max = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let cut = rank_tol.max(0.0) * lam_max;
    let mut f = DVector::zeros(eig.eigenvalues.len());
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam < -1e-8 * lam_max {
            return Err(OwlError::InvalidInput(format!(
                "pinv_sqrt input is indefinite (eigenvalue {lam:.3e})"
            )));
        }
        f[i] = if lam <= cut { 0.0 } else { 1.0 / lam.sqrt() };
    }
    let mut qf = eig.eigenvectors.clone();
    for (j, mut col) in qf.column_iter_mut().enumerate() {
        col *= f[j];
    }
    Ok(&qf * eig.eigenvectors.transpose())
}

/// Singular-value calculus `U f(Sigma) V^T` for a scalar `f` with `f(0) = 0`.
/// The zero matrix maps to zero.
pub fn sv_apply<F: Fn(f64) -> f64>(z: &DenseMatrix, f: F, rank_tol: f64) -> Result<DenseMatrix> {
    let svd = compact_svd(z, rank_tol)?;
    if svd.rank() == 0 {
        return Ok(DenseMatrix::zeros(z.nrows(), z.ncols()));
    }
    let mut uf = svd.u.clone();
    for (j, mut col) in uf.column_iter_mut().enumerate() {
        col *= f(svd.sigma[j]);
    }
    Ok(uf * &svd.vt)
}
