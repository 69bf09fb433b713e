//! Spectral norm estimates for `P` and `H`, and step sizes satisfying
//! `α(‖P‖ + β‖H‖²) < 1`.

use crate::rng::SeededStream;
use crate::scalar::{dot, norm2, Scalar};
use crate::sparse::SparseMatrix;

pub const DEFAULT_NORM_TOL: f64 = 1e-9;
pub const DEFAULT_NORM_MAX_ITERS: usize = 5000;
/// Factor applied to power-iteration estimates before they enter the step
/// size formula, since power iteration approaches the norm from below.
pub const NORM_INFLATION: f64 = 1.01;
/// Step size used when both `P` and `H` vanish.
pub const ALPHA_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate<T> {
    pub value: T,
    pub iterations: usize,
    /// Relative change of the estimate at the final iteration.
    pub residual: T,
}

impl<T: Scalar> NormEstimate<T> {
    pub fn inflated(&self) -> T {
        self.value * T::lit(NORM_INFLATION)
    }
}

fn power_iteration<T: Scalar>(
    dim: usize,
    tol: T,
    max_it: usize,
    seed: u64,
    mut apply: impl FnMut(&[T], &mut [T]),
) -> NormEstimate<T> {
    let zero = NormEstimate {
        value: T::zero(),
        iterations: 0,
        residual: T::zero(),
    };
    if dim == 0 {
        return zero;
    }
    let mut rng = SeededStream::new(seed);
    let mut v: Vec<T> = (0..dim).map(|_| T::lit(rng.normal())).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x = *x / nv);
    let mut w = vec![T::zero(); dim];

    let mut prev = T::zero();
    let mut residual = T::infinity();
    for it in 1..=max_it {
        apply(&v, &mut w);
        // v is a unit vector, so ⟨v, Av⟩ is the Rayleigh quotient of A
        let rq = dot(&v, &w).abs();
        let nw = norm2(&w);
        if nw == T::zero() {
            return zero;
        }
        residual = if rq > T::zero() {
            (rq - prev).abs() / rq
        } else {
            T::infinity()
        };
        prev = rq;
        v.iter_mut().zip(&w).for_each(|(x, &y)| *x = y / nw);
        if residual < tol {
            return NormEstimate {
                value: rq,
                iterations: it,
                residual,
            };
        }
    }
    NormEstimate {
        value: prev,
        iterations: max_it,
        residual,
    }
}

/// Largest eigenvalue magnitude of a symmetric matrix by power iteration on
/// `P²`, which handles eigenvalues of both signs.
pub fn spectral_norm_sym<T: Scalar>(
    p: &SparseMatrix<T>,
    tol: T,
    max_it: usize,
    seed: u64,
) -> NormEstimate<T> {
    assert_eq!(p.rows(), p.cols(), "symmetric norm needs a square matrix");
    let mut tmp = vec![T::zero(); p.rows()];
    let est = power_iteration(p.cols(), tol + tol, max_it, seed, |v, out| {
        p.mul_vec_into(v, &mut tmp);
        p.mul_vec_into(&tmp, out);
    });
    sqrt_estimate(est)
}

/// Largest singular value by power iteration on `HᵀH`.
pub fn spectral_norm_rect<T: Scalar>(
    h: &SparseMatrix<T>,
    tol: T,
    max_it: usize,
    seed: u64,
) -> NormEstimate<T> {
    let mut tmp = vec![T::zero(); h.rows()];
    let est = power_iteration(h.cols(), tol + tol, max_it, seed, |v, out| {
        h.mul_vec_into(v, &mut tmp);
        h.mul_t_vec_into(&tmp, out);
    });
    sqrt_estimate(est)
}

fn sqrt_estimate<T: Scalar>(est: NormEstimate<T>) -> NormEstimate<T> {
    // relative change of √x is about half that of x
    NormEstimate {
        value: est.value.sqrt(),
        iterations: est.iterations,
        residual: est.residual / T::lit(2.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSizes<T> {
    pub alpha: T,
    pub beta: T,
}

/// `α = safety · 2 / (√(‖P‖² + 4ω‖H‖²) + ‖P‖)`, `β = ωα`.
pub fn step_sizes<T: Scalar>(norm_p: T, norm_h: T, omega: T, safety: T) -> StepSizes<T> {
    assert!(omega > T::zero(), "omega must be positive");
    assert!(
        safety > T::zero() && safety < T::one(),
        "safety must lie in (0, 1)"
    );
    assert!(
        norm_p >= T::zero() && norm_h >= T::zero(),
        "norms must be nonnegative"
    );
    let denom = (norm_p * norm_p + T::lit(4.0) * omega * norm_h * norm_h).sqrt() + norm_p;
    let alpha = if denom > T::zero() {
        safety * T::lit(2.0) / denom
    } else {
        safety * T::lit(ALPHA_CAP)
    };
    StepSizes {
        alpha,
        beta: omega * alpha,
    }
}
