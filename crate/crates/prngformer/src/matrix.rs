//! Dense row-major matrices with a per-row nonzero index.
//!
//! Compiled weight matrices are overwhelmingly sparse (a feed-forward row
//! typically reads two or three channels), so every product iterates the
//! recorded nonzero columns only. Skipping exact zeros is part of the
//! arithmetic contract: there is a single product code path, entries are
//! visited in ascending column order, and negative zeros are normalized
//! away at construction, so results are reproducible bit for bit across
//! runs and across full/incremental evaluation orders.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    row_nnz: Vec<Vec<u32>>,
}

impl Matrix {
    /// Builds a matrix from row-major data. Negative zeros are normalized
    /// to positive zero; entries must be finite.
    pub fn new(rows: usize, cols: usize, mut data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        assert!(cols <= u32::MAX as usize, "column count exceeds index range");
        for v in &mut data {
            assert!(v.is_finite(), "matrix entries must be finite");
            if *v == 0.0 {
                *v = 0.0;
            }
        }
        let row_nnz = build_index(rows, cols, &data);
        Matrix { rows, cols, data, row_nnz }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix::new(n, n, data)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix::new(r, c, data)
    }

    /// Accumulates `(row, col, value)` triplets into a zero matrix.
    /// Repeated coordinates add together.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut data = vec![0.0; rows * cols];
        for &(r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) out of {rows}x{cols}");
            data[r * cols + c] += v;
        }
        Matrix::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn nonzero_count(&self) -> usize {
        self.row_nnz.iter().map(Vec::len).sum()
    }

    /// Computes `y = x^T W` for a row vector `x` of length `rows`,
    /// returning a vector of length `cols`. Zero entries of `x` and zero
    /// matrix entries are skipped; surviving terms accumulate in ascending
    /// (row, column) order.
    pub fn vecmat(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.cols];
        self.vecmat_into(x, &mut y);
        y
    }

    /// As [`Matrix::vecmat`], accumulating into a caller-provided buffer
    /// that must be zeroed (or hold a partial sum to add onto).
    pub fn vecmat_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.rows, "vector/matrix size mismatch");
        assert_eq!(y.len(), self.cols, "output buffer size mismatch");
        for (r, &xv) in x.iter().enumerate() {
            if xv == 0.0 {
                continue;
            }
            let base = r * self.cols;
            for &c in &self.row_nnz[r] {
                y[c as usize] += xv * self.data[base + c as usize];
            }
        }
    }

    /// Applies `f` to every entry, rebuilding the nonzero index.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Matrix::new(self.rows, self.cols, self.data.iter().map(|&v| f(v)).collect())
    }
}

fn build_index(rows: usize, cols: usize, data: &[f64]) -> Vec<Vec<u32>> {
    let mut index = Vec::with_capacity(rows);
    for r in 0..rows {
        let base = r * cols;
        let mut cs = Vec::new();
        for c in 0..cols {
            if data[base + c] != 0.0 {
                cs.push(c as u32);
            }
        }
        index.push(cs);
    }
    index
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<MatrixRepr> for Matrix {
    type Error = String;

    fn try_from(r: MatrixRepr) -> Result<Self, String> {
        if r.data.len() != r.rows * r.cols {
            return Err(format!(
                "matrix payload holds {} values, shape {}x{} needs {}",
                r.data.len(),
                r.rows,
                r.cols,
                r.rows * r.cols
            ));
        }
        if let Some(bad) = r.data.iter().find(|v| !v.is_finite()) {
            return Err(format!("matrix entries must be finite, found {bad}"));
        }
        Ok(Matrix::new(r.rows, r.cols, r.data))
    }
}

impl From<Matrix> for MatrixRepr {
    fn from(m: Matrix) -> MatrixRepr {
        MatrixRepr { rows: m.rows, cols: m.cols, data: m.data }
    }
}
