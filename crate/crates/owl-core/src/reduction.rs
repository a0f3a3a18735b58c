//! SVD-based problem reduction, solution expansion, feature ranking, and
//! least-squares refit.
//!
//! When `Y = Y' Q` with `Q` having orthonormal rows, any solution `Z'` of the
//! reduced problem with data `Y'` expands to a solution `Z' Q` of the
//! original problem, with row support and the orthogonally weighted norm
//! preserved. The same factorization applied to the dictionary (`A = P Sigma
//! Q`) shrinks the column count of the self-representation problem used for
//! feature selection.

use crate::error::{OwlError, Result};
use crate::matrix::{validate_finite, DenseMatrix};
use crate::svd::compact_svd;

/// Rank-truncated factorization of an observation (or dictionary) matrix.
#[derive(Debug, Clone)]
pub struct ReducedData {
    /// `Y' = U Sigma` (M x r); for a dictionary this is `A' = P Sigma'`.
    pub yprime: DenseMatrix,
    /// `r x K` with orthonormal rows.
    pub q: DenseMatrix,
    /// Effective rank after truncation.
    pub rank: usize,
    /// Achieved relative reconstruction error `||Y'Q - Y||_Fro / ||Y||_Fro`.
    pub tol_used: f64,
}

fn reduce_with<F>(y: &DenseMatrix, keep: F) -> Result<ReducedData>
where
    F: Fn(usize, f64, f64) -> bool,
{
    validate_finite("reduction input", y)?;
    let total = y.norm();
    if total == 0.0 {
        return Err(OwlError::DegenerateInput(
            "cannot reduce the zero matrix".into(),
        ));
    }
    let svd = compact_svd(y, 0.0)?;
    let sigma_max = svd.sigma_max();
    let rank = svd
        .sigma
        .iter()
        .enumerate()
        .take_while(|(i, s)| keep(*i, **s, sigma_max))
        .count();
    if rank == 0 {
        return Err(OwlError::DegenerateInput(
            "reduction would drop every singular value".into(),
        ));
    }
    let mut yprime = svd.u.columns(0, rank).into_owned();
    for (j, mut col) in yprime.column_iter_mut().enumerate() {
        col *= svd.sigma[j];
    }
    let q = svd.vt.rows(0, rank).into_owned();
    let dropped: f64 = svd.sigma.iter().skip(rank).map(|s| s * s).sum();
    Ok(ReducedData {
        yprime,
        q,
        rank,
        tol_used: dropped.sqrt() / total,
    })
}

/// Reduces `Y` to `Y' Q` keeping singular values above `rel_tol * sigma_max`.
pub fn reduce_data(y: &DenseMatrix, rel_tol: f64) -> Result<ReducedData> {
    if !(0.0..1.0).contains(&rel_tol) {
        return Err(OwlError::InvalidInput(format!(
            "rel_tol must lie in [0, 1), got {rel_tol}"
        )));
    }
    reduce_with(y, |_, s, smax| s > rel_tol * smax)
}

/// Reduces `Y` to exactly `rank` singular triplets.
pub fn reduce_data_rank(y: &DenseMatrix, rank: usize) -> Result<ReducedData> {
    if rank == 0 {
        return Err(OwlError::InvalidInput("reduction rank must be >= 1".into()));
    }
    reduce_with(y, |i, _, _| i < rank)
}

/// Dictionary-side reduction `A = P Sigma Q` for the self-representation
/// problem: the returned `yprime` holds `A' = P Sigma'` and the caller solves
/// with observations `A'`, expanding by `Q` afterwards. The cutoff should be
/// linked to the acceptable reconstruction error.
pub fn reduce_dictionary(a: &DenseMatrix, rel_tol: f64) -> Result<ReducedData> {
    reduce_data(a, rel_tol)
}

/// `Z' Q`: maps a reduced solution back to the original column space. Row
/// support is preserved exactly because `Q` acts on the right.
pub fn expand_solution(zprime: &DenseMatrix, q: &DenseMatrix) -> Result<DenseMatrix> {
    if zprime.ncols() != q.nrows() {
        return Err(OwlError::DimensionMismatch {
            context: "expand_solution",
            expected: format!("Z' with {} columns", q.nrows()),
            got: format!("{} columns", zprime.ncols()),
        });
    }
    Ok(zprime * q)
}

/// Rows of a solution ranked by importance (Euclidean row norm).
#[derive(Debug, Clone)]
pub struct FeatureRanking {
    /// Row indices, descending importance; ties broken by ascending index.
    pub indices: Vec<usize>,
    /// Matching row norms, descending.
    pub scores: Vec<f64>,
    /// Rows dropped by the pruning rule.
    pub pruned_count: usize,
}

/// Ranks rows by descending l2 norm and prunes rows whose score falls below
/// `prune_rel` times the maximum score. An all-zero matrix yields an empty
/// ranking.
pub fn select_features(z: &DenseMatrix, prune_rel: f64) -> FeatureRanking {
    let norms: Vec<f64> = z.row_iter().map(|r| r.norm()).collect();
    let max = norms.iter().fold(0.0_f64, |m, &v| m.max(v));
    if max == 0.0 {
        return FeatureRanking {
            indices: Vec::new(),
            scores: Vec::new(),
            pruned_count: z.nrows(),
        };
    }
    let mut order: Vec<usize> = (0..norms.len()).collect();
    order.sort_by(|&a, &b| {
        norms[b]
            .partial_cmp(&norms[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let cut = prune_rel * max;
    let kept: Vec<usize> = order.into_iter().filter(|&i| norms[i] >= cut).collect();
    let pruned_count = z.nrows() - kept.len();
    let scores = kept.iter().map(|&i| norms[i]).collect();
    FeatureRanking {
        indices: kept,
        scores,
        pruned_count,
    }
}

/// Least-squares refit on a fixed support: minimizes `||A_S X_S - Y||_Fro`
/// over the coefficients of the supported rows (minimum-norm solution when
/// the selected columns are dependent). Returns the full-size coefficient
/// matrix (zero off support) and the root-mean-square error
/// `||A_S X_S - Y||_Fro / sqrt(M K)`.
pub fn refit_least_squares(
    a: &DenseMatrix,
    y: &DenseMatrix,
    support: &[usize],
) -> Result<(DenseMatrix, f64)> {
    if support.is_empty() {
        return Err(OwlError::InvalidInput("refit support is empty".into()));
    }
    if a.nrows() != y.nrows() {
        return Err(OwlError::DimensionMismatch {
            context: "refit_least_squares",
            expected: format!("Y with {} rows", a.nrows()),
            got: format!("{} rows", y.nrows()),
        });
    }
    if let Some(&bad) = support.iter().find(|&&i| i >= a.ncols()) {
        return Err(OwlError::InvalidInput(format!(
            "support index {bad} out of range for {} columns",
            a.ncols()
        )));
    }
    let a_s = a.select_columns(support.iter());
    // Minimum-norm least squares through the compact SVD of A_S.
    let svd = compact_svd(&a_s, 1e-12)?;
    let mut x_s = DenseMatrix::zeros(support.len(), y.ncols());
    if svd.rank() > 0 {
        let uty = svd.u.tr_mul(y);
        let mut scaled = uty;
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            row /= svd.sigma[i];
        }
        x_s = svd.vt.tr_mul(&scaled);
    }
    let resid = (&a_s * &x_s - y).norm();
    let rmse = resid / ((a.nrows() * y.ncols()) as f64).sqrt();
    let mut x = DenseMatrix::zeros(a.ncols(), y.ncols());
    for (slot, &idx) in support.iter().enumerate() {
        x.set_row(idx, &x_s.row(slot));
    }
    Ok((x, rmse))
}
