//! Compressed sparse storage for `P` and `H`.
//!
//! Matrices are built from coordinate triplets, kept sorted row-major, and
//! carry both a row-compressed and a column-compressed index so that `A x`
//! and `Aᵀ y` are each a single sequential sweep with a fixed reduction
//! order.

use crate::error::ModelError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    // row-major sorted triplets
    row_idx: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
    row_ptr: Vec<usize>,
    // column-major permutation of the triplet positions
    col_ptr: Vec<usize>,
    col_perm: Vec<usize>,
}

impl<T: Scalar> SparseMatrix<T> {
    /// Builds a matrix from `(row, col, value)` triplets. Explicit zeros are
    /// kept; repeated coordinates and out-of-range indices are rejected.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self, ModelError> {
        let mut trip: Vec<(usize, usize, T)> = triplets.into_iter().collect();
        for &(r, c, _) in &trip {
            if r >= rows || c >= cols {
                return Err(ModelError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
        }
        trip.sort_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = trip
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(ModelError::DuplicateEntry {
                row: w[0].0,
                col: w[0].1,
            });
        }

        let nnz = trip.len();
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_ptr = vec![0usize; cols + 1];
        for &(r, c, _) in &trip {
            row_ptr[r + 1] += 1;
            col_ptr[c + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        for j in 0..cols {
            col_ptr[j + 1] += col_ptr[j];
        }
        let mut next = col_ptr.clone();
        let mut col_perm = vec![0usize; nnz];
        for (k, &(_, c, _)) in trip.iter().enumerate() {
            col_perm[next[c]] = k;
            next[c] += 1;
        }

        Ok(Self {
            rows,
            cols,
            row_idx: trip.iter().map(|t| t.0).collect(),
            col_idx: trip.iter().map(|t| t.1).collect(),
            values: trip.iter().map(|t| t.2).collect(),
            row_ptr,
            col_ptr,
            col_perm,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_triplets(rows, cols, std::iter::empty()).expect("empty matrix is valid")
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, T::one()))).expect("identity is valid")
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_triplets(n, n, diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
            .expect("diagonal is valid")
    }

    /// Builds from a dense row-major slice, dropping exact zeros.
    pub fn from_dense(rows: usize, cols: usize, data: &[T]) -> Self {
        assert_eq!(data.len(), rows * cols, "dense data has wrong length");
        let trip = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .filter_map(|(r, c)| {
                let v = data[r * cols + c];
                (v != T::zero()).then_some((r, c, v))
            });
        Self::from_triplets(rows, cols, trip).expect("dense indices are in range")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Triplets in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nnz()).map(move |k| (self.row_idx[k], self.col_idx[k], self.values[k]))
    }

    /// Stored value at `(r, c)`, or `None` if the coordinate is not stored.
    pub fn get(&self, r: usize, c: usize) -> Option<T> {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        self.col_idx[lo..hi]
            .binary_search(&c)
            .ok()
            .map(|k| self.values[lo + k])
    }

    /// Columns touched by row `r`.
    pub fn row_cols(&self, r: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[r]..self.row_ptr[r + 1]]
    }

    /// `out = A x`
    pub fn mul_vec_into(&self, x: &[T], out: &mut [T]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = T::zero();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc = acc + self.values[k] * x[self.col_idx[k]];
            }
            *o = acc;
        }
    }

    /// `out = Aᵀ y`
    pub fn mul_t_vec_into(&self, y: &[T], out: &mut [T]) {
        assert_eq!(y.len(), self.rows);
        assert_eq!(out.len(), self.cols);
        for (c, o) in out.iter_mut().enumerate() {
            let mut acc = T::zero();
            for &k in &self.col_perm[self.col_ptr[c]..self.col_ptr[c + 1]] {
                acc = acc + self.values[k] * y[self.row_idx[k]];
            }
            *o = acc;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.rows];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn mul_t_vec(&self, y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.cols];
        self.mul_t_vec_into(y, &mut out);
        out
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.rows * self.cols];
        for (r, c, v) in self.triplets() {
            d[r * self.cols + c] = v;
        }
        d
    }

    /// Converts the stored values to another scalar type.
    pub fn cast<U: Scalar>(&self) -> SparseMatrix<U> {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            row_idx: self.row_idx.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|v| U::lit(v.as_f64())).collect(),
            row_ptr: self.row_ptr.clone(),
            col_ptr: self.col_ptr.clone(),
            col_perm: self.col_perm.clone(),
        }
    }
}
