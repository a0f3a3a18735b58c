//! Brute-force spark computation for test-scale dictionaries.

use crate::error::{OwlError, Result};
use crate::matrix::{validate_finite, DenseMatrix};
use crate::svd::numerical_rank;

const MAX_SPARK_COLS: usize = 20;
const SPARK_RANK_TOL: f64 = 1e-10;

/// Smallest cardinality of a linearly dependent column subset of `a`,
/// determined by numerical rank at relative tolerance 1e-10. When every
/// subset up to size `min(rows, cols)` is independent, returns the sentinel
/// `min(rows, cols) + 1` (equal to `cols + 1` for full-rank square or tall
/// dictionaries).
pub fn spark(a: &DenseMatrix) -> Result<usize> {
    validate_finite("spark input", a)?;
    let (m, n) = a.shape();
    if n > MAX_SPARK_COLS {
        return Err(OwlError::SizeLimit(format!(
            "spark is a combinatorial brute force limited to {MAX_SPARK_COLS} columns, got {n}"
        )));
    }
    let limit = m.min(n);
    let mut subset: Vec<usize> = Vec::new();
    for size in 1..=limit {
        subset.clear();
        subset.extend(0..size);
        loop {
            let sub = a.select_columns(subset.iter());
            if numerical_rank(&sub, SPARK_RANK_TOL)? < size {
                return Ok(size);
            }
            if !next_combination(&mut subset, n, size) {
                break;
            }
        }
    }
    Ok(limit + 1)
}

/// Advances `subset` to the next size-`size` combination of `0..n` in
/// lexicographic order. Returns false after the last one.
fn next_combination(subset: &mut [usize], n: usize, size: usize) -> bool {
    let mut i = size;
    while i > 0 {
        i -= 1;
        if subset[i] != i + n - size {
            subset[i] += 1;
            for j in i + 1..size {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
