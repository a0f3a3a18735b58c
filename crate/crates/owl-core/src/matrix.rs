//! Dense matrix carrier and CSV I/O.
//!
//! All matrices in this crate are dense, real, and validated to be free of
//! NaN/Inf before they enter a solver path. The CSV format is one matrix row
//! per line, comma-separated decimal floats, no header, LF line endings.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{OwlError, Result};

/// The universal carrier for `A`, `X`, `Y`, `Z`.
pub type DenseMatrix = DMatrix<f64>;

/// Rejects NaN/Inf entries and empty shapes.
pub fn validate_finite(name: &str, m: &DenseMatrix) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(OwlError::InvalidInput(format!(
            "{name} must have at least one row and one column"
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(OwlError::InvalidInput(format!(
            "{name} contains non-finite entries"
        )));
    }
    Ok(())
}

/// Largest singular value (operator norm w.r.t. the Euclidean inner product).
pub fn op_norm(m: &DenseMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Trace inner product `<A, B> = tr(A^T B)`.
pub fn trace_inner(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Euclidean norms of the rows.
pub fn row_norms(m: &DenseMatrix) -> DVector<f64> {
    DVector::from_iterator(m.nrows(), m.row_iter().map(|r| r.norm()))
}

pub fn max_row_norm(m: &DenseMatrix) -> f64 {
    m.row_iter().map(|r| r.norm()).fold(0.0, f64::max)
}

/// Reads a matrix from CSV. Reports parse failures with 1-based line numbers.
pub fn read_matrix_csv(path: &Path, skip_header: bool) -> Result<DenseMatrix> {
    let file = std::fs::File::open(path).map_err(|source| OwlError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = 0;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| OwlError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if skip_header && idx == 0 {
            continue;
        }
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() {
            continue;
        }
        let row = trimmed
            .split(',')
            .map(|field| {
                field.trim().parse::<f64>().map_err(|_| OwlError::Csv {
                    line: line_no,
                    message: format!("cannot parse '{}' as a float", field.trim()),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if rows.is_empty() {
            width = row.len();
        } else if row.len() != width {
            return Err(OwlError::Csv {
                line: line_no,
                message: format!("expected {} fields, found {}", width, row.len()),
            });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(OwlError::Csv {
            line: 1,
            message: "no data rows".into(),
        });
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    let m = DenseMatrix::from_row_slice(rows.len(), width, &flat);
    validate_finite("CSV matrix", &m)?;
    Ok(m)
}

/// Writes a matrix as CSV (row per line, LF endings, shortest round-trip floats).
pub fn write_matrix_csv(path: &Path, m: &DenseMatrix) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(|source| {
        OwlError::Io {
            path: path.display().to_string(),
            source,
        }
    })?);
    for i in 0..m.nrows() {
        let line: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)])).collect();
        writeln!(out, "{}", line.join(",")).map_err(|source| OwlError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan() {
        let m = DenseMatrix::from_row_slice(1, 2, &[1.0, f64::NAN]);
        assert!(validate_finite("m", &m).is_err());
    }

    #[test]
    fn op_norm_of_diag() {
        let m = DenseMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -7.0]);
        assert!((op_norm(&m) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_and_line_errors() {
        let dir = std::env::temp_dir().join("owl_matrix_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.csv");
        let m = DenseMatrix::from_row_slice(2, 3, &[1.0, -2.5, 3e-9, 4.0, 5.0, 6.0]);
        write_matrix_csv(&path, &m).unwrap();
        let back = read_matrix_csv(&path, false).unwrap();
        assert_eq!(back, m);

        let bad = dir.join("bad.csv");
        std::fs::write(&bad, "1.0,2.0\n3.0,oops\n").unwrap();
        match read_matrix_csv(&bad, false) {
            Err(OwlError::Csv { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected CSV error, got {other:?}"),
        }
    }

    #[test]
    fn csv_skip_header() {
        let dir = std::env::temp_dir().join("owl_matrix_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("h.csv");
        std::fs::write(&path, "a,b\n1.0,2.0\n").unwrap();
        let m = read_matrix_csv(&path, true).unwrap();
        assert_eq!(m, DenseMatrix::from_row_slice(1, 2, &[1.0, 2.0]));
    }
}
