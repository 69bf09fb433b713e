//! Zero-order-hold discretization of the spring–mass chain.

use crate::scalar::Scalar;

/// Small dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx] + a * other.at(k, j);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .map(|v| v.abs())
                    .sum()
            })
            .fold(T::zero(), T::max)
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out.set(r, c, self.at(r0 + r, c0 + c));
            }
        }
        out
    }
}

/// Matrix exponential by scaling and squaring a truncated Taylor series.
///
/// The argument is scaled by `2^-s` with `s` the smallest count giving
/// `‖X‖∞ / 2^s ≤ 0.5`; series terms are added until a term's norm drops
/// below `1e-16`.
pub fn expm<T: Scalar>(x: &Dense<T>) -> Dense<T> {
    assert_eq!(x.rows, x.cols, "expm needs a square matrix");
    let n = x.rows;
    let half = T::lit(0.5);
    let mut squarings = 0u32;
    let mut norm = x.norm_inf();
    while norm > half {
        norm = norm * half;
        squarings += 1;
    }
    let y = x.scale(T::lit(0.5f64.powi(squarings as i32)));

    let mut sum = Dense::identity(n);
    let mut term = Dense::identity(n);
    let stop = T::lit(1e-16);
    for k in 1..=64 {
        term = term.matmul(&y).scale(T::one() / T::lit(k as f64));
        sum.data
            .iter_mut()
            .zip(&term.data)
            .for_each(|(s, &t)| *s = *s + t);
        if term.norm_inf() < stop {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// Tridiagonal stiffness matrix of `l` masses between two walls.
pub fn stiffness<T: Scalar>(l: usize) -> Dense<T> {
    let mut k = Dense::zeros(l, l);
    for i in 0..l {
        k.set(i, i, T::lit(2.0));
        if i + 1 < l {
            k.set(i, i + 1, -T::one());
            k.set(i + 1, i, -T::one());
        }
    }
    k
}

/// Discrete-time `(A, B)` for a sampling period `dt`.
///
/// `A = exp(dt·M)` with `M = [[0, I], [−L, 0]]`, and `B = ∫₀^dt exp(sM) ds · [0; I]`,
/// both read off one exponential of the augmented matrix `dt·[[M, E], [0, 0]]`.
pub fn build_dynamics<T: Scalar>(l: usize, dt: T) -> (Dense<T>, Dense<T>) {
    assert!(l >= 1 && dt > T::zero());
    let nx = 2 * l;
    let size = nx + l;
    let stiff = stiffness::<T>(l);
    let mut aug = Dense::zeros(size, size);
    for i in 0..l {
        aug.set(i, l + i, dt);
        for j in 0..l {
            aug.set(l + i, j, -stiff.at(i, j) * dt);
        }
        aug.set(l + i, nx + i, dt);
    }
    let e = expm(&aug);
    (e.block(0, 0, nx, nx), e.block(0, nx, nx, l))
}
