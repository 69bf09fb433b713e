//! Validation of infeasibility certificates against the limit identities
//! satisfied by the increments `w̄ = lim (w^{j+1} − w^j)` and
//! `z̄ = lim (z^{j+1} − z^j)`:
//!
//! ```text
//! inf_{z ∈ D} ⟨Hz − g, w̄⟩ = sup_{y ∈ K} ⟨y, w̄⟩ + ‖w̄‖² / (ρβ),   w̄ ∈ K°
//! Hz̄ ∈ K,  Pz̄ = 0,  ⟨q, z̄⟩ = −‖z̄‖² / (ρα),                      z̄ ∈ rec D
//! ```
//!
//! Certificates are kept unnormalized; the quadratic terms above only hold
//! for the raw increments.

use crate::model::ConicQp;
use crate::projections::{inf_linear_over_box, project_cone, project_polar, recession_box};
use crate::scalar::{dot, norm_inf, Scalar};
use crate::spectral::StepSizes;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    PrimalInfeasibility,
    DualInfeasibility,
}

/// One evaluated condition. Identities pass when `residual ≤ bound`; strict
/// conditions pass when `residual < bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck<T> {
    pub name: &'static str,
    pub residual: T,
    pub bound: T,
    pub strict: bool,
}

impl<T: Scalar> IdentityCheck<T> {
    fn new(name: &'static str, residual: T, bound: T) -> Self {
        Self {
            name,
            residual,
            bound,
            strict: false,
        }
    }

    fn strict(name: &'static str, residual: T, bound: T) -> Self {
        Self {
            name,
            residual,
            bound,
            strict: true,
        }
    }

    pub fn passed(&self) -> bool {
        if self.strict {
            self.residual < self.bound
        } else {
            self.residual <= self.bound
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateDiagnostics<T> {
    pub checks: Vec<IdentityCheck<T>>,
}

impl<T: Scalar> CertificateDiagnostics<T> {
    /// Identities and strict conditions all hold: the direction proves
    /// infeasibility.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    /// The limit identities hold, ignoring the strict conditions. The zero
    /// direction satisfies these trivially.
    pub fn identities_hold(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| !c.strict)
            .all(IdentityCheck::passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck<T>> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T> {
    pub kind: CertificateKind,
    /// `w̄` (length m) for primal infeasibility, `z̄` (length n) for dual.
    pub direction: Vec<T>,
    pub diagnostics: CertificateDiagnostics<T>,
}

pub const POLAR_MEMBERSHIP: &str = "polar_membership";
pub const SEPARATION_IDENTITY: &str = "separation_identity";
pub const CONE_MEMBERSHIP: &str = "cone_membership";
pub const P_KERNEL: &str = "p_kernel";
pub const RECESSION_MEMBERSHIP: &str = "recession_membership";
pub const DESCENT_IDENTITY: &str = "descent_identity";
/// `inf_{z ∈ D} ⟨Hz − g, w̄⟩ > sup_{y ∈ K} ⟨y, w̄⟩`
pub const STRICT_SEPARATION: &str = "strict_separation";
/// `⟨q, z̄⟩ < 0`
pub const STRICT_DESCENT: &str = "strict_descent";

/// Evaluates every condition for the given certificate kind. Never fails;
/// each check carries its own verdict.
///
/// Membership conditions of a dual direction (`Hz̄ ∈ K`, `Pz̄ = 0`,
/// `z̄ ∈ rec D`) are measured against `tol·‖z̄‖∞`, since they are
/// positively homogeneous and a tiny increment would otherwise pass them.
pub fn certificate_check<T: Scalar>(
    qp: &ConicQp<T>,
    kind: CertificateKind,
    direction: &[T],
    rho: T,
    steps: StepSizes<T>,
    tol: T,
) -> CertificateDiagnostics<T> {
    let checks = match kind {
        CertificateKind::PrimalInfeasibility => primal_checks(qp, direction, rho, steps.beta, tol),
        CertificateKind::DualInfeasibility => dual_checks(qp, direction, rho, steps.alpha, tol),
    };
    CertificateDiagnostics { checks }
}

fn primal_checks<T: Scalar>(
    qp: &ConicQp<T>,
    wbar: &[T],
    rho: T,
    beta: T,
    tol: T,
) -> Vec<IdentityCheck<T>> {
    assert_eq!(wbar.len(), qp.m(), "primal certificate has length m");
    let sq = dot(wbar, wbar);
    let polar = project_polar(wbar, qp.cone());
    let gap = wbar
        .iter()
        .zip(&polar)
        .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()));
    let in_polar = gap <= tol * T::one().max(sq.sqrt());

    // sup over K of ⟨y, w̄⟩ is 0 on K° and +∞ off it
    let support_k = if in_polar { T::zero() } else { T::infinity() };
    let inf_d = inf_linear_over_box(qp.h(), qp.g(), qp.set(), wbar);
    let identity = (inf_d - support_k - sq / (rho * beta)).abs();
    let identity = if identity.is_nan() {
        T::infinity()
    } else {
        identity
    };

    let margin = inf_d - support_k;
    let margin = if margin.is_nan() {
        T::neg_infinity()
    } else {
        margin
    };

    vec![
        IdentityCheck::new(POLAR_MEMBERSHIP, gap, tol * T::one().max(sq.sqrt())),
        IdentityCheck::new(SEPARATION_IDENTITY, identity, tol * T::one().max(sq)),
        IdentityCheck::strict(STRICT_SEPARATION, -margin, T::zero()),
    ]
}

fn dual_checks<T: Scalar>(
    qp: &ConicQp<T>,
    zbar: &[T],
    rho: T,
    alpha: T,
    tol: T,
) -> Vec<IdentityCheck<T>> {
    assert_eq!(zbar.len(), qp.n(), "dual certificate has length n");
    let hz = qp.h().mul_vec(zbar);
    let hz_proj = project_cone(&hz, qp.cone());
    let cone_gap = hz
        .iter()
        .zip(&hz_proj)
        .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()));

    let pz = norm_inf(&qp.p().mul_vec(zbar));

    let rec = recession_box(qp.set());
    let rec_gap = zbar
        .iter()
        .zip(rec.lower().iter().zip(rec.upper()))
        .fold(T::zero(), |acc, (&v, (&lo, &hi))| {
            acc.max(lo - v).max(v - hi)
        });

    let quad = dot(zbar, zbar) / (rho * alpha);
    let qz = dot(qp.q(), zbar);
    let descent = (qz + quad).abs();
    let scale = tol * norm_inf(zbar);

    vec![
        IdentityCheck::new(CONE_MEMBERSHIP, cone_gap, scale),
        IdentityCheck::new(P_KERNEL, pz, scale),
        IdentityCheck::new(RECESSION_MEMBERSHIP, rec_gap, scale),
        IdentityCheck::new(DESCENT_IDENTITY, descent, tol * T::one().max(quad)),
        IdentityCheck::strict(STRICT_DESCENT, qz, T::zero()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoxProduct, ConeSpec};
    use crate::sparse::SparseMatrix;

    fn infeasible_1d() -> ConicQp<f64> {
        ConicQp::new(
            SparseMatrix::identity(1),
            vec![0.0],
            SparseMatrix::identity(1),
            vec![0.0],
            ConeSpec::zero(1),
            BoxProduct::new(vec![1.0], vec![2.0]).unwrap(),
        )
    }

    fn unbounded_1d() -> ConicQp<f64> {
        ConicQp::new(
            SparseMatrix::zeros(1, 1),
            vec![-1.0],
            SparseMatrix::zeros(0, 1),
            vec![],
            ConeSpec::zero(0),
            BoxProduct::free(1),
        )
    }

    const STEPS: StepSizes<f64> = StepSizes {
        alpha: 0.5,
        beta: 0.25,
    };

    #[test]
    fn zero_directions_satisfy_identities_but_prove_nothing() {
        let d = certificate_check(
            &infeasible_1d(),
            CertificateKind::PrimalInfeasibility,
            &[0.0],
            1.6,
            STEPS,
            1e-9,
        );
        assert!(d.identities_hold());
        assert!(!d.passed());
        let d = certificate_check(
            &unbounded_1d(),
            CertificateKind::DualInfeasibility,
            &[0.0],
            1.6,
            STEPS,
            1e-9,
        );
        assert!(d.identities_hold());
        assert!(!d.passed());
    }

    #[test]
    fn tiny_increment_on_strongly_convex_problem_rejected() {
        let qp = ConicQp::new(
            SparseMatrix::identity(2),
            vec![0.0, 0.0],
            SparseMatrix::zeros(0, 2),
            vec![],
            ConeSpec::zero(0),
            BoxProduct::uniform(2, -1.0, 1.0),
        );
        let d = certificate_check(
            &qp,
            CertificateKind::DualInfeasibility,
            &[3e-7, -2e-7],
            1.6,
            STEPS,
            1e-6,
        );
        assert!(!d.get(P_KERNEL).unwrap().passed());
        assert!(!d.passed());
    }

    #[test]
    fn exact_limits_pass() {
        // w̄ = ρβ for the scalar problem on [1, 2]
        let rho = 1.6;
        let d = certificate_check(
            &infeasible_1d(),
            CertificateKind::PrimalInfeasibility,
            &[rho * STEPS.beta],
            rho,
            STEPS,
            1e-12,
        );
        assert!(d.passed(), "{d:?}");
        // z̄ = ρα for min −z over R
        let d = certificate_check(
            &unbounded_1d(),
            CertificateKind::DualInfeasibility,
            &[rho * STEPS.alpha],
            rho,
            STEPS,
            1e-12,
        );
        assert!(d.passed(), "{d:?}");
    }

    #[test]
    fn wrong_directions_fail() {
        let d = certificate_check(
            &infeasible_1d(),
            CertificateKind::PrimalInfeasibility,
            &[1.0],
            1.6,
            STEPS,
            1e-6,
        );
        assert!(!d.get(SEPARATION_IDENTITY).unwrap().passed());
        let d = certificate_check(
            &unbounded_1d(),
            CertificateKind::DualInfeasibility,
            &[-0.8],
            1.6,
            STEPS,
            1e-6,
        );
        assert!(!d.get(DESCENT_IDENTITY).unwrap().passed());

        // a direction leaving the bounded box is not a recession direction
        let bounded = ConicQp::new(
            SparseMatrix::zeros(1, 1),
            vec![-1.0],
            SparseMatrix::zeros(0, 1),
            vec![],
            ConeSpec::zero(0),
            BoxProduct::new(vec![0.0], vec![5.0]).unwrap(),
        );
        let d = certificate_check(
            &bounded,
            CertificateKind::DualInfeasibility,
            &[0.8],
            1.6,
            STEPS,
            1e-6,
        );
        assert!(!d.get(RECESSION_MEMBERSHIP).unwrap().passed());
    }
}
