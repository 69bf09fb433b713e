use crate::model::ConicQp;
use crate::projections::{project_box_in_place, project_polar_in_place};
use crate::scalar::Scalar;
use crate::spectral::StepSizes;

/// Iterates of the method: the relaxed pair `(ξ, η)`, the projected pair
/// `(z, w)`, and the projected pair from the previous iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState<T> {
    pub xi: Vec<T>,
    pub eta: Vec<T>,
    pub z: Vec<T>,
    pub z_prev: Vec<T>,
    pub w: Vec<T>,
    pub w_prev: Vec<T>,
    /// Number of updates applied so far.
    pub iteration: usize,
    grad: Vec<T>,
    dual_grad: Vec<T>,
    ext: Vec<T>,
    hz: Vec<T>,
}

impl<T: Scalar> SolverState<T> {
    /// Starts from `ξ = π_D[0]` and `η = 0`.
    pub fn new(qp: &ConicQp<T>) -> Self {
        let mut xi = vec![T::zero(); qp.n()];
        project_box_in_place(&mut xi, qp.set());
        Self::from_start(qp, xi, vec![T::zero(); qp.m()])
    }

    /// Starts from a caller supplied `(ξ, η)`.
    pub fn from_start(qp: &ConicQp<T>, xi: Vec<T>, eta: Vec<T>) -> Self {
        assert_eq!(xi.len(), qp.n(), "xi has wrong length");
        assert_eq!(eta.len(), qp.m(), "eta has wrong length");
        let (n, m) = (qp.n(), qp.m());
        Self {
            z: xi.clone(),
            z_prev: xi.clone(),
            w: eta.clone(),
            w_prev: eta.clone(),
            xi,
            eta,
            iteration: 0,
            grad: vec![T::zero(); n],
            dual_grad: vec![T::zero(); n],
            ext: vec![T::zero(); n],
            hz: vec![T::zero(); m],
        }
    }

    /// `(ξ, η)` stacked.
    pub fn zeta(&self) -> Vec<T> {
        self.xi.iter().chain(&self.eta).copied().collect()
    }
}

/// One update of the method:
///
/// ```text
/// z⁺ = π_D[ξ − α(Pξ + q + Hᵀη)]
/// w⁺ = π_K°[η + β(H(2z⁺ − ξ) − g)]
/// ξ⁺ = (1 − ρ)ξ + ρz⁺
/// η⁺ = (1 − ρ)η + ρw⁺
/// ```
///
/// With `ρ = 1` the relaxed pair is copied from the projected pair, so the
/// sequence is exactly that of the unrelaxed method. Returns `false` if a
/// non-finite value appeared in `z⁺` or `w⁺`.
pub fn iterate<T: Scalar>(
    state: &mut SolverState<T>,
    qp: &ConicQp<T>,
    steps: StepSizes<T>,
    rho: T,
) -> bool {
    let StepSizes { alpha, beta } = steps;
    let two = T::lit(2.0);
    std::mem::swap(&mut state.z, &mut state.z_prev);
    std::mem::swap(&mut state.w, &mut state.w_prev);

    qp.p().mul_vec_into(&state.xi, &mut state.grad);
    qp.h().mul_t_vec_into(&state.eta, &mut state.dual_grad);
    for i in 0..qp.n() {
        state.z[i] = state.xi[i] - alpha * (state.grad[i] + qp.q()[i] + state.dual_grad[i]);
    }
    project_box_in_place(&mut state.z, qp.set());

    for i in 0..qp.n() {
        state.ext[i] = two * state.z[i] - state.xi[i];
    }
    qp.h().mul_vec_into(&state.ext, &mut state.hz);
    for k in 0..qp.m() {
        state.w[k] = state.eta[k] + beta * (state.hz[k] - qp.g()[k]);
    }
    project_polar_in_place(&mut state.w, qp.cone());

    if rho == T::one() {
        state.xi.copy_from_slice(&state.z);
        state.eta.copy_from_slice(&state.w);
    } else {
        let keep = T::one() - rho;
        for (x, &z) in state.xi.iter_mut().zip(&state.z) {
            *x = keep * *x + rho * z;
        }
        for (e, &w) in state.eta.iter_mut().zip(&state.w) {
            *e = keep * *e + rho * w;
        }
    }
    state.iteration += 1;
    state.z.iter().chain(&state.w).all(|v| v.is_finite())
}
