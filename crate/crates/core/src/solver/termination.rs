//! Termination tests.
//!
//! * The displacement test classifies a run by the scaled differences of
//!   successive projected iterates.
//! * The feasibility test bounds constraint violation and complementary
//!   slackness of the box against the reduced gradient `r = −Pz − q − Hᵀw`.
//! * The infeasibility test checks that the latest dual increment separates
//!   `{Hz − g : z ∈ D}` from `K` up to a slack.

use crate::model::{ConeBlock, ConicQp};
use crate::projections::{inf_linear_over_box, project_cone, project_polar};
use crate::scalar::{dist2, norm_inf, Scalar};
use crate::spectral::StepSizes;

use super::state::SolverState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisplacementVerdict {
    /// Fewer than two updates have been applied.
    Continue,
    Optimal,
    /// At least one scaled displacement exceeds the threshold; `primal` is
    /// flagged by the dual displacement and `dual` by the primal one.
    Infeasible {
        primal: bool,
        dual: bool,
    },
}

/// `(‖z − z_prev‖ / αρ, ‖w − w_prev‖ / βρ)`.
pub fn scaled_displacements<T: Scalar>(
    state: &SolverState<T>,
    steps: StepSizes<T>,
    rho: T,
) -> (T, T) {
    let dz = dist2(&state.z, &state.z_prev) / (steps.alpha * rho);
    let dw = dist2(&state.w, &state.w_prev) / (steps.beta * rho);
    (dz, dw)
}

pub fn check_displacement<T: Scalar>(
    state: &SolverState<T>,
    steps: StepSizes<T>,
    rho: T,
    eps_abs: T,
) -> DisplacementVerdict {
    if state.iteration < 2 {
        return DisplacementVerdict::Continue;
    }
    let (dz, dw) = scaled_displacements(state, steps, rho);
    if dz <= eps_abs && dw <= eps_abs {
        DisplacementVerdict::Optimal
    } else {
        DisplacementVerdict::Infeasible {
            primal: dw > eps_abs,
            dual: dz > eps_abs,
        }
    }
}

/// The three residuals of the feasibility test, each an ∞-norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityResiduals<T> {
    /// Cone constraint violation `‖Hz − g − π_K(Hz − g)‖∞`. Blocks other
    /// than the zero cone also contribute `|⟨Hz − g, w⟩|`.
    pub constraint: T,
    /// `‖(upper − z) ⊙ max(0, r)‖∞`
    pub upper: T,
    /// `‖(lower − z) ⊙ min(0, r)‖∞`
    pub lower: T,
}

impl<T: Scalar> FeasibilityResiduals<T> {
    pub fn max(&self) -> T {
        self.constraint.max(self.upper).max(self.lower)
    }

    pub fn within(&self, eps: T) -> bool {
        self.constraint <= eps && self.upper <= eps && self.lower <= eps
    }
}

// slack · r with an infinite slack: only a reduced gradient already within
// eps is tolerated, and then it is reported as is
fn slack_product<T: Scalar>(slack: T, r: T, eps: T) -> T {
    if r == T::zero() {
        T::zero()
    } else if slack.is_infinite() {
        if r.abs() <= eps {
            r.abs()
        } else {
            T::infinity()
        }
    } else {
        (slack * r).abs()
    }
}

pub fn feasibility_residuals<T: Scalar>(
    qp: &ConicQp<T>,
    z: &[T],
    w: &[T],
    eps_fea: T,
) -> FeasibilityResiduals<T> {
    let mut hz = qp.h().mul_vec(z);
    hz.iter_mut().zip(qp.g()).for_each(|(v, &g)| *v = *v - g);
    let proj = project_cone(&hz, qp.cone());
    let mut constraint = hz
        .iter()
        .zip(&proj)
        .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()));
    for (block, range) in qp.cone().ranges() {
        if !matches!(block, ConeBlock::Zero(_)) {
            let comp = range.fold(T::zero(), |acc, k| acc + hz[k] * w[k]);
            constraint = constraint.max(comp.abs());
        }
    }

    let pz = qp.p().mul_vec(z);
    let htw = qp.h().mul_t_vec(w);
    let set = qp.set();
    let mut upper = T::zero();
    let mut lower = T::zero();
    for i in 0..qp.n() {
        let r = -pz[i] - qp.q()[i] - htw[i];
        upper = upper.max(slack_product(
            set.upper()[i] - z[i],
            r.max(T::zero()),
            eps_fea,
        ));
        lower = lower.max(slack_product(
            set.lower()[i] - z[i],
            r.min(T::zero()),
            eps_fea,
        ));
    }
    FeasibilityResiduals {
        constraint,
        upper,
        lower,
    }
}

pub fn check_feasible_termination<T: Scalar>(
    qp: &ConicQp<T>,
    z: &[T],
    w: &[T],
    eps_fea: T,
) -> bool {
    feasibility_residuals(qp, z, w, eps_fea).within(eps_fea)
}

/// `inf_{z ∈ D} ⟨Hz − g, w − w_prev⟩`.
pub fn infeasibility_value<T: Scalar>(qp: &ConicQp<T>, w: &[T], w_prev: &[T]) -> T {
    let dw: Vec<T> = w.iter().zip(w_prev).map(|(&a, &b)| a - b).collect();
    inf_linear_over_box(qp.h(), qp.g(), qp.set(), &dw)
}

/// True when `inf_{z ∈ D} ⟨Hz − g, w − w_prev⟩ + eps_inf > 0`. For cones
/// other than `{0}` the increment must also lie in `K°` within `eps_inf`,
/// which makes `sup_{y ∈ K} ⟨y, w − w_prev⟩` vanish.
pub fn check_infeasible_termination<T: Scalar>(
    qp: &ConicQp<T>,
    w: &[T],
    w_prev: &[T],
    eps_inf: T,
) -> bool {
    if !(infeasibility_value(qp, w, w_prev) + eps_inf > T::zero()) {
        return false;
    }
    if qp.cone().is_zero_cone() {
        return true;
    }
    let dw: Vec<T> = w.iter().zip(w_prev).map(|(&a, &b)| a - b).collect();
    let polar = project_polar(&dw, qp.cone());
    let gap: Vec<T> = dw.iter().zip(&polar).map(|(&a, &b)| a - b).collect();
    norm_inf(&gap) <= eps_inf
}
