//! The extrapolated proportional-integral projected gradient method.

mod certificate;
mod config;
mod state;
mod termination;

use std::time::{Duration, Instant};

pub use certificate::{
    certificate_check, Certificate, CertificateDiagnostics, CertificateKind, IdentityCheck,
    CONE_MEMBERSHIP, DESCENT_IDENTITY, POLAR_MEMBERSHIP, P_KERNEL, RECESSION_MEMBERSHIP,
    SEPARATION_IDENTITY, STRICT_DESCENT, STRICT_SEPARATION,
};
pub use config::SolverConfig;
pub use state::{iterate, SolverState};
pub use termination::{
    check_displacement, check_feasible_termination, check_infeasible_termination,
    feasibility_residuals, infeasibility_value, scaled_displacements, DisplacementVerdict,
    FeasibilityResiduals,
};

use crate::error::SolveError;
use crate::model::ConicQp;
use crate::scalar::{norm_inf, Scalar};
use crate::spectral::{spectral_norm_rect, spectral_norm_sym, step_sizes, StepSizes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIterations,
    /// A non-finite iterate appeared.
    NumericalFailure,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::PrimalInfeasible => "primal_infeasible",
            SolveStatus::DualInfeasible => "dual_infeasible",
            SolveStatus::MaxIterations => "max_iterations",
            SolveStatus::NumericalFailure => "numerical_failure",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of the convergence trace, recorded at every check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow<T> {
    pub iteration: usize,
    pub primal_displacement: T,
    pub dual_displacement: T,
    pub residuals: FeasibilityResiduals<T>,
    /// `inf_{z ∈ D} ⟨Hz − g, w − w_prev⟩`
    pub infeasibility_value: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats<T> {
    pub iterations: usize,
    pub primal_displacement: T,
    pub dual_displacement: T,
    pub residuals: FeasibilityResiduals<T>,
    pub infeasibility_value: T,
    pub steps: StepSizes<T>,
    pub norm_p: T,
    pub norm_h: T,
    /// Set when the run was stopped by the divergence guard.
    pub diverged: bool,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T> {
    pub status: SolveStatus,
    pub z: Vec<T>,
    pub w: Vec<T>,
    pub certificate: Option<Certificate<T>>,
    pub stats: SolveStats<T>,
    pub trace: Vec<TraceRow<T>>,
}

/// Step sizes from the configuration: overrides when given, otherwise from
/// inflated norm estimates. Also returns the raw estimates of `‖P‖`, `‖H‖`.
pub fn resolve_steps<T: Scalar>(qp: &ConicQp<T>, cfg: &SolverConfig<T>) -> (StepSizes<T>, T, T) {
    let np = spectral_norm_sym(qp.p(), cfg.norm_tol, cfg.norm_max_iters, cfg.norm_seed);
    let nh = spectral_norm_rect(
        qp.h(),
        cfg.norm_tol,
        cfg.norm_max_iters,
        cfg.norm_seed.wrapping_add(1),
    );
    let auto = step_sizes(np.inflated(), nh.inflated(), cfg.omega, cfg.safety);
    let alpha = cfg.alpha.unwrap_or(auto.alpha);
    let beta = cfg.beta.unwrap_or_else(|| {
        if cfg.alpha.is_some() {
            cfg.omega * alpha
        } else {
            auto.beta
        }
    });
    (StepSizes { alpha, beta }, np.value, nh.value)
}

/// Solves from the default start `ξ = π_D[0]`, `η = 0`.
pub fn solve<T: Scalar>(
    qp: &ConicQp<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolveResult<T>, SolveError> {
    let report = qp.validate();
    if !report.is_empty() {
        return Err(SolveError::InvalidProblem(report));
    }
    cfg.check()?;
    let state = SolverState::new(qp);
    Ok(run(qp, cfg, state))
}

/// Solves from a caller supplied `(ξ, η)`.
pub fn solve_from<T: Scalar>(
    qp: &ConicQp<T>,
    cfg: &SolverConfig<T>,
    xi: Vec<T>,
    eta: Vec<T>,
) -> Result<SolveResult<T>, SolveError> {
    let report = qp.validate();
    if !report.is_empty() {
        return Err(SolveError::InvalidProblem(report));
    }
    cfg.check()?;
    if xi.len() != qp.n() || eta.len() != qp.m() {
        return Err(SolveError::InvalidConfig(
            "starting point has wrong dimensions".into(),
        ));
    }
    let state = SolverState::from_start(qp, xi, eta);
    Ok(run(qp, cfg, state))
}

fn run<T: Scalar>(
    qp: &ConicQp<T>,
    cfg: &SolverConfig<T>,
    mut state: SolverState<T>,
) -> SolveResult<T> {
    let started = Instant::now();
    let (steps, norm_p, norm_h) = resolve_steps(qp, cfg);
    let rho = cfg.rho;

    let mut trace = Vec::new();
    let mut last = Checkpoint::<T>::empty();
    let mut dual_streak = 0usize;
    let mut outcome: Option<(SolveStatus, Option<Certificate<T>>)> = None;
    let mut diverged = false;

    for j in 1..=cfg.max_iters {
        if !iterate(&mut state, qp, steps, rho) {
            // report the last finite projected pair
            std::mem::swap(&mut state.z, &mut state.z_prev);
            std::mem::swap(&mut state.w, &mut state.w_prev);
            outcome = Some((SolveStatus::NumericalFailure, None));
            break;
        }
        if j < 2 || (j % cfg.check_interval != 0 && j != cfg.max_iters) {
            continue;
        }

        last = Checkpoint::evaluate(qp, &state, steps, rho, cfg.eps_fea);
        if cfg.record_trace {
            trace.push(last.row(j));
        }

        if last.residuals.within(cfg.eps_fea) && last.dz <= cfg.eps_abs && last.dw <= cfg.eps_abs {
            outcome = Some((SolveStatus::Optimal, None));
            break;
        }

        if last.dw > cfg.eps_abs
            && check_infeasible_termination(qp, &state.w, &state.w_prev, cfg.eps_inf)
        {
            let cert = certificate_from(
                qp,
                CertificateKind::PrimalInfeasibility,
                &state.w,
                &state.w_prev,
                rho,
                steps,
                cfg,
            );
            if cert.diagnostics.passed() {
                outcome = Some((SolveStatus::PrimalInfeasible, Some(cert)));
                break;
            }
        }

        if last.dz > cfg.eps_abs {
            let cert = certificate_from(
                qp,
                CertificateKind::DualInfeasibility,
                &state.z,
                &state.z_prev,
                rho,
                steps,
                cfg,
            );
            if cert.diagnostics.passed() {
                dual_streak += 1;
                if dual_streak >= cfg.dual_confirmations {
                    outcome = Some((SolveStatus::DualInfeasible, Some(cert)));
                    break;
                }
            } else {
                dual_streak = 0;
            }
        } else {
            dual_streak = 0;
        }

        if norm_inf(&state.xi) > cfg.divergence_bound || norm_inf(&state.eta) > cfg.divergence_bound
        {
            diverged = true;
            break;
        }
    }

    let (status, certificate) = outcome.unwrap_or((SolveStatus::MaxIterations, None));
    if last.iteration != state.iteration && status != SolveStatus::NumericalFailure {
        last = Checkpoint::evaluate(qp, &state, steps, rho, cfg.eps_fea);
    }
    SolveResult {
        status,
        stats: SolveStats {
            iterations: state.iteration,
            primal_displacement: last.dz,
            dual_displacement: last.dw,
            residuals: last.residuals,
            infeasibility_value: last.v_inf,
            steps,
            norm_p,
            norm_h,
            diverged,
            elapsed: started.elapsed(),
        },
        z: state.z,
        w: state.w,
        certificate,
        trace,
    }
}

fn certificate_from<T: Scalar>(
    qp: &ConicQp<T>,
    kind: CertificateKind,
    current: &[T],
    previous: &[T],
    rho: T,
    steps: StepSizes<T>,
    cfg: &SolverConfig<T>,
) -> Certificate<T> {
    let direction: Vec<T> = current.iter().zip(previous).map(|(&a, &b)| a - b).collect();
    let diagnostics = certificate_check(qp, kind, &direction, rho, steps, cfg.cert_tol);
    Certificate {
        kind,
        direction,
        diagnostics,
    }
}

struct Checkpoint<T> {
    iteration: usize,
    dz: T,
    dw: T,
    residuals: FeasibilityResiduals<T>,
    v_inf: T,
}

impl<T: Scalar> Checkpoint<T> {
    fn empty() -> Self {
        let nan = T::nan();
        Self {
            iteration: 0,
            dz: nan,
            dw: nan,
            residuals: FeasibilityResiduals {
                constraint: nan,
                upper: nan,
                lower: nan,
            },
            v_inf: nan,
        }
    }

    fn evaluate(
        qp: &ConicQp<T>,
        state: &SolverState<T>,
        steps: StepSizes<T>,
        rho: T,
        eps_fea: T,
    ) -> Self {
        let (dz, dw) = scaled_displacements(state, steps, rho);
        Self {
            iteration: state.iteration,
            dz,
            dw,
            residuals: feasibility_residuals(qp, &state.z, &state.w, eps_fea),
            v_inf: infeasibility_value(qp, &state.w, &state.w_prev),
        }
    }

    fn row(&self, iteration: usize) -> TraceRow<T> {
        TraceRow {
            iteration,
            primal_displacement: self.dz,
            dual_displacement: self.dw,
            residuals: self.residuals,
            infeasibility_value: self.v_inf,
        }
    }
}
