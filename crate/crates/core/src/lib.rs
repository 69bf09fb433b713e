//! Sparse first-order solver for conic quadratic programs
//!
//! ```text
//! minimize    ½ zᵀPz + qᵀz
//! subject to  Hz − g ∈ K,  z ∈ D
//! ```
//!
//! where `K` is a product of zero, nonnegative and second-order cones and `D`
//! is a product of intervals. The solver runs the extrapolated
//! proportional-integral projected gradient method: each iteration costs one
//! product with `P`, `H` and `Hᵀ` plus two projections, and no linear system
//! is ever factored. A run ends with either a point passing the KKT residual
//! tests or a validated certificate of primal or dual infeasibility.
//!
//! Everything numerical is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below name the common double precision instantiations.
//!
//! ```
//! use xpipg::{solve, BoxProduct, ConeSpec, ConicQp64, SolveStatus, SolverConfig, SparseMatrix};
//!
//! // minimize ½z² over z ∈ [1, 2]
//! let qp = ConicQp64::new(
//!     SparseMatrix::identity(1),
//!     vec![0.0],
//!     SparseMatrix::zeros(0, 1),
//!     vec![],
//!     ConeSpec::zero(0),
//!     BoxProduct::new(vec![1.0], vec![2.0]).unwrap(),
//! );
//! let res = solve(&qp, &SolverConfig::default()).unwrap();
//! assert_eq!(res.status, SolveStatus::Optimal);
//! assert!((res.z[0] - 1.0).abs() < 1e-6);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod model;
pub mod oracle;
pub mod oscillating;
pub mod projections;
pub mod rng;
pub mod scalar;
pub mod solver;
pub mod sparse;
pub mod spectral;

pub use error::{ModelError, ParseError, SolveError};
pub use model::{BoxProduct, ConeBlock, ConeSpec, ConicQp, Violation};
pub use oscillating::{
    benchmark_instance, oscillating_masses, sample_initial_state, OscMassParams,
};
pub use scalar::Scalar;
pub use solver::{
    certificate_check, solve, solve_from, Certificate, CertificateKind, SolveResult, SolveStatus,
    SolverConfig, SolverState, TraceRow,
};
pub use sparse::SparseMatrix;
pub use spectral::{NormEstimate, StepSizes};

pub type SparseMatrix64 = SparseMatrix<f64>;
pub type BoxProduct64 = BoxProduct<f64>;
pub type ConicQp64 = ConicQp<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolveResult64 = SolveResult<f64>;

pub type SparseMatrix32 = SparseMatrix<f32>;
pub type BoxProduct32 = BoxProduct<f32>;
pub type ConicQp32 = ConicQp<f32>;
pub type SolverConfig32 = SolverConfig<f32>;
pub type SolveResult32 = SolveResult<f32>;
