use crate::error::SolveError;
use crate::scalar::Scalar;
use crate::spectral::{DEFAULT_NORM_MAX_ITERS, DEFAULT_NORM_TOL};

/// Tuning knobs for [`solve`](super::solve).
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    /// Relaxation factor in `(0, 2)`; values above 1 extrapolate.
    pub rho: T,
    /// Ratio `β / α`.
    pub omega: T,
    /// Fraction of the largest admissible `α` actually used.
    pub safety: T,
    /// Threshold on the scaled successive-iterate displacements.
    pub eps_abs: T,
    /// Threshold on the feasibility and stationarity residuals.
    pub eps_fea: T,
    /// Slack in the primal infeasibility test.
    pub eps_inf: T,
    /// Tolerance for validating infeasibility certificates.
    pub cert_tol: T,
    pub max_iters: usize,
    /// Termination tests run every `check_interval` iterations.
    pub check_interval: usize,
    /// Consecutive checks a dual infeasibility candidate must survive.
    pub dual_confirmations: usize,
    /// Overrides for the step sizes computed from norm estimates.
    pub alpha: Option<T>,
    pub beta: Option<T>,
    pub norm_tol: T,
    pub norm_max_iters: usize,
    pub norm_seed: u64,
    /// Abort once `‖ξ‖∞` or `‖η‖∞` exceeds this without a certificate.
    pub divergence_bound: T,
    pub record_trace: bool,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            rho: T::lit(1.6),
            omega: T::one(),
            safety: T::lit(0.9),
            eps_abs: T::lit(1e-4),
            eps_fea: T::lit(1e-4),
            eps_inf: T::lit(1e-4),
            cert_tol: T::lit(1e-6),
            max_iters: 200_000,
            check_interval: 10,
            dual_confirmations: 3,
            alpha: None,
            beta: None,
            norm_tol: T::lit(DEFAULT_NORM_TOL),
            norm_max_iters: DEFAULT_NORM_MAX_ITERS,
            norm_seed: 0,
            divergence_bound: T::lit(1e12),
            record_trace: false,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    /// Sets `eps_abs` and `eps_fea` together.
    pub fn with_tolerance(mut self, eps: T) -> Self {
        self.eps_abs = eps;
        self.eps_fea = eps;
        self
    }

    pub fn with_rho(mut self, rho: T) -> Self {
        self.rho = rho;
        self
    }

    pub fn check(&self) -> Result<(), SolveError> {
        let err = |s: &str| Err(SolveError::InvalidConfig(s.to_string()));
        if !(self.rho > T::zero() && self.rho < T::lit(2.0)) {
            return err("rho must lie strictly between 0 and 2");
        }
        if !(self.omega > T::zero()) {
            return err("omega must be positive");
        }
        if !(self.safety > T::zero() && self.safety < T::one()) {
            return err("safety must lie strictly between 0 and 1");
        }
        for (name, v) in [
            ("eps_abs", self.eps_abs),
            ("eps_fea", self.eps_fea),
            ("eps_inf", self.eps_inf),
            ("cert_tol", self.cert_tol),
        ] {
            if !(v > T::zero()) {
                return Err(SolveError::InvalidConfig(format!(
                    "{name} must be positive"
                )));
            }
        }
        if self.check_interval == 0 {
            return err("check_interval must be at least 1");
        }
        if self.dual_confirmations == 0 {
            return err("dual_confirmations must be at least 1");
        }
        for v in [self.alpha, self.beta].into_iter().flatten() {
            if !(v > T::zero() && v.is_finite()) {
                return err("step size overrides must be positive and finite");
            }
        }
        Ok(())
    }
}
