mod common;

use common::{infeasible_1d, unbounded_1d};
use xpipg::solver::{
    certificate_check, iterate, resolve_steps, CertificateKind, DESCENT_IDENTITY,
    SEPARATION_IDENTITY,
};
use xpipg::{
    solve, BoxProduct, ConeBlock, ConeSpec, ConicQp64, SolveStatus, SolverConfig64, SolverState,
    SparseMatrix,
};

#[test]
fn clamped_scalar_is_optimal() {
    let qp = ConicQp64::new(
        SparseMatrix::identity(1),
        vec![0.0],
        SparseMatrix::zeros(0, 1),
        vec![],
        ConeSpec::zero(0),
        BoxProduct::new(vec![1.0], vec![2.0]).unwrap(),
    );
    let r = solve(&qp, &SolverConfig64::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.z[0] - 1.0).abs() <= 1e-6);
}

#[test]
fn second_order_cone_projection_problem() {
    // min ½‖z‖² + qᵀz over the cone: the projection of −q = (1, 2, 0)
    let qp = ConicQp64::new(
        SparseMatrix::identity(3),
        vec![-1.0, -2.0, 0.0],
        SparseMatrix::identity(3),
        vec![0.0; 3],
        ConeSpec::new(vec![ConeBlock::SecondOrder(3)]),
        BoxProduct::free(3),
    );
    let cfg = SolverConfig64 {
        max_iters: 500_000,
        ..SolverConfig64::default().with_tolerance(1e-9)
    };
    let r = solve(&qp, &cfg).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    for (x, y) in r.z.iter().zip([1.5, 1.5, 0.0]) {
        assert!((x - y).abs() < 1e-6, "{:?}", r.z);
    }
}

#[test]
fn scalar_infeasible_problem_is_certified() {
    let qp = infeasible_1d();
    let r = solve(&qp, &SolverConfig64::default()).unwrap();
    assert_eq!(r.status, SolveStatus::PrimalInfeasible);
    let cert = r.certificate.unwrap();
    assert_eq!(cert.kind, CertificateKind::PrimalInfeasibility);
    assert!(cert.direction[0] > 0.0);
    assert!(cert.diagnostics.passed());
}

#[test]
fn unbounded_scalar_is_dual_infeasible() {
    let qp = unbounded_1d();
    let r = solve(&qp, &SolverConfig64::default()).unwrap();
    assert_eq!(r.status, SolveStatus::DualInfeasible);
    let cert = r.certificate.unwrap();
    assert_eq!(cert.kind, CertificateKind::DualInfeasibility);
    assert!(cert.direction[0] > 0.0);
}

fn run_differences(
    qp: &ConicQp64,
    rho: f64,
    iterations: usize,
) -> (Vec<f64>, Vec<f64>, xpipg::StepSizes<f64>) {
    let (steps, _, _) = resolve_steps(qp, &SolverConfig64::default());
    let mut s = SolverState::new(qp);
    for _ in 0..iterations {
        assert!(iterate(&mut s, qp, steps, rho));
    }
    let dz = s.z.iter().zip(&s.z_prev).map(|(a, b)| a - b).collect();
    let dw = s.w.iter().zip(&s.w_prev).map(|(a, b)| a - b).collect();
    (dz, dw, steps)
}

#[test]
fn long_run_separation_identity() {
    let qp = infeasible_1d();
    for rho in [1.0, 1.6] {
        let (_, dw, steps) = run_differences(&qp, rho, 100_000);
        // w̄ = ρβ · inf_{z ∈ [1, 2]} z
        assert!((dw[0] / (rho * steps.beta) - 1.0).abs() < 1e-9);
        let diag = certificate_check(
            &qp,
            CertificateKind::PrimalInfeasibility,
            &dw,
            rho,
            steps,
            1e-6,
        );
        assert!(diag.passed(), "{diag:?}");
        assert!(diag.get(SEPARATION_IDENTITY).unwrap().residual <= 1e-6);
    }
}

#[test]
fn long_run_descent_identity() {
    let qp = unbounded_1d();
    for rho in [1.0, 1.6] {
        let (dz, _, steps) = run_differences(&qp, rho, 100_000);
        assert!((dz[0] - rho * steps.alpha).abs() <= 1e-12 * dz[0]);
        let diag = certificate_check(
            &qp,
            CertificateKind::DualInfeasibility,
            &dz,
            rho,
            steps,
            1e-6,
        );
        assert!(diag.passed(), "{diag:?}");
    }
}

#[test]
fn descent_direction_lies_in_kernel_of_p() {
    // min ½z₁² − z₂ with z₁ = 0: unbounded along (0, 1)
    let qp = ConicQp64::new(
        SparseMatrix::from_diagonal(&[1.0, 0.0]),
        vec![0.0, -1.0],
        SparseMatrix::from_dense(1, 2, &[1.0, 0.0]),
        vec![0.0],
        ConeSpec::zero(1),
        BoxProduct::free(2),
    );
    let (dz, _, steps) = run_differences(&qp, 1.6, 100_000);
    assert!(dz[0].abs() <= 1e-8);
    assert!((dz[1] - 1.6 * steps.alpha).abs() <= 1e-6 * dz[1]);
    let diag = certificate_check(
        &qp,
        CertificateKind::DualInfeasibility,
        &dz,
        1.6,
        steps,
        1e-6,
    );
    assert!(diag.passed(), "{diag:?}");
    assert!(diag.get(DESCENT_IDENTITY).unwrap().residual <= 1e-6);
}
