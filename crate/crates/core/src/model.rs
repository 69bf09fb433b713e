//! Problem data: minimize ½ zᵀPz + qᵀz subject to Hz − g ∈ K and z ∈ D,
//! where K is a product of primitive cones and D a product of intervals.

use std::fmt;

use crate::error::ModelError;
use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;

/// Relative tolerance used when comparing mirrored entries of `P`.
pub const SYMMETRY_RTOL: f64 = 1e-12;

/// Product of closed intervals `[lower[i], upper[i]]`; bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxProduct<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> BoxProduct<T> {
    /// Ordering of the bounds is not checked here; see [`ConicQp::validate`].
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self, ModelError> {
        if lower.len() != upper.len() {
            return Err(ModelError::LengthMismatch {
                what: "upper bounds",
                expected: lower.len(),
                found: upper.len(),
            });
        }
        Ok(Self { lower, upper })
    }

    /// All of `Rⁿ`.
    pub fn free(n: usize) -> Self {
        Self {
            lower: vec![T::neg_infinity(); n],
            upper: vec![T::infinity(); n],
        }
    }

    /// `[lo, hi]ⁿ`
    pub fn uniform(n: usize, lo: T, hi: T) -> Self {
        Self {
            lower: vec![lo; n],
            upper: vec![hi; n],
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn is_singleton(&self, i: usize) -> bool {
        self.lower[i] == self.upper[i]
    }

    /// Membership with an absolute slack.
    pub fn contains(&self, z: &[T], tol: T) -> bool {
        z.len() == self.len()
            && z.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| v >= lo - tol && v <= hi + tol)
    }

    pub fn cast<U: Scalar>(&self) -> BoxProduct<U> {
        BoxProduct {
            lower: self.lower.iter().map(|v| U::lit(v.as_f64())).collect(),
            upper: self.upper.iter().map(|v| U::lit(v.as_f64())).collect(),
        }
    }
}

/// One primitive factor of the cone `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConeBlock {
    /// `{0}^d`
    Zero(usize),
    /// `R₊^d`
    Nonneg(usize),
    /// `{(t, x) ∈ R × R^{d−1} : ‖x‖ ≤ t}`
    SecondOrder(usize),
}

impl ConeBlock {
    pub fn dim(self) -> usize {
        match self {
            ConeBlock::Zero(d) | ConeBlock::Nonneg(d) | ConeBlock::SecondOrder(d) => d,
        }
    }
}

/// Ordered product of primitive cones.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConeSpec {
    blocks: Vec<ConeBlock>,
}

impl ConeSpec {
    pub fn new(blocks: Vec<ConeBlock>) -> Self {
        Self { blocks }
    }

    /// A single zero block of dimension `m` (empty when `m == 0`).
    pub fn zero(m: usize) -> Self {
        if m == 0 {
            Self::default()
        } else {
            Self {
                blocks: vec![ConeBlock::Zero(m)],
            }
        }
    }

    pub fn blocks(&self) -> &[ConeBlock] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim()).sum()
    }

    pub fn is_zero_cone(&self) -> bool {
        self.blocks.iter().all(|b| matches!(b, ConeBlock::Zero(_)))
    }

    /// Blocks paired with their coordinate ranges.
    pub fn ranges(&self) -> impl Iterator<Item = (ConeBlock, std::ops::Range<usize>)> + '_ {
        self.blocks.iter().scan(0usize, |off, &b| {
            let r = *off..*off + b.dim();
            *off += b.dim();
            Some((b, r))
        })
    }
}

/// A structural problem found by [`ConicQp::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    Asymmetric {
        row: usize,
        col: usize,
    },
    BoundsReversed {
        index: usize,
    },
    InvalidBound {
        index: usize,
    },
    ConeDimMismatch {
        expected: usize,
        found: usize,
    },
    EmptyConeBlock {
        block: usize,
    },
    NonFinite {
        what: &'static str,
        index: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch {
                what,
                expected,
                found,
            } => {
                write!(
                    f,
                    "dimension mismatch in {what}: expected {expected}, found {found}"
                )
            }
            Violation::Asymmetric { row, col } => {
                write!(f, "P is not symmetric at ({row}, {col})")
            }
            Violation::BoundsReversed { index } => {
                write!(f, "bounds reversed at coordinate {index}")
            }
            Violation::InvalidBound { index } => {
                write!(f, "invalid bound at coordinate {index}")
            }
            Violation::ConeDimMismatch { expected, found } => {
                write!(f, "cone dimension {found} does not match m = {expected}")
            }
            Violation::EmptyConeBlock { block } => {
                write!(f, "cone block {block} has dimension 0")
            }
            Violation::NonFinite { what, index } => {
                write!(f, "non-finite value in {what} at index {index}")
            }
        }
    }
}

/// A conic quadratic program. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicQp<T> {
    p: SparseMatrix<T>,
    q: Vec<T>,
    h: SparseMatrix<T>,
    g: Vec<T>,
    cone: ConeSpec,
    set: BoxProduct<T>,
}

impl<T: Scalar> ConicQp<T> {
    /// Assembles a problem without checking it; call [`validate`](Self::validate)
    /// before solving. `P` is assumed positive semidefinite and only its
    /// symmetry is checked.
    pub fn new(
        p: SparseMatrix<T>,
        q: Vec<T>,
        h: SparseMatrix<T>,
        g: Vec<T>,
        cone: ConeSpec,
        set: BoxProduct<T>,
    ) -> Self {
        Self {
            p,
            q,
            h,
            g,
            cone,
            set,
        }
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn m(&self) -> usize {
        self.g.len()
    }

    pub fn p(&self) -> &SparseMatrix<T> {
        &self.p
    }

    pub fn q(&self) -> &[T] {
        &self.q
    }

    pub fn h(&self) -> &SparseMatrix<T> {
        &self.h
    }

    pub fn g(&self) -> &[T] {
        &self.g
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    pub fn set(&self) -> &BoxProduct<T> {
        &self.set
    }

    /// ½ zᵀPz + qᵀz
    pub fn objective(&self, z: &[T]) -> T {
        let pz = self.p.mul_vec(z);
        let half = T::lit(0.5);
        z.iter()
            .zip(&pz)
            .zip(&self.q)
            .fold(T::zero(), |acc, ((&zi, &pzi), &qi)| {
                acc + half * zi * pzi + qi * zi
            })
    }

    /// Lists every structural defect; an empty report means well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n();
        let m = self.m();
        let mut dim = |what, expected: usize, found: usize| {
            if expected != found {
                out.push(Violation::DimensionMismatch {
                    what,
                    expected,
                    found,
                });
            }
        };
        dim("P rows", n, self.p.rows());
        dim("P cols", n, self.p.cols());
        dim("H rows", m, self.h.rows());
        dim("H cols", n, self.h.cols());
        dim("box", n, self.set.len());

        if self.cone.dim() != m {
            out.push(Violation::ConeDimMismatch {
                expected: m,
                found: self.cone.dim(),
            });
        }
        for (k, b) in self.cone.blocks().iter().enumerate() {
            if b.dim() == 0 {
                out.push(Violation::EmptyConeBlock { block: k });
            }
        }

        if self.p.rows() == self.p.cols() {
            let rtol = T::lit(SYMMETRY_RTOL);
            for (r, c, v) in self.p.triplets().filter(|&(r, c, _)| r < c) {
                let mirror = self.p.get(c, r).unwrap_or(T::zero());
                if (v - mirror).abs() > rtol * v.abs().max(mirror.abs()) {
                    out.push(Violation::Asymmetric { row: r, col: c });
                }
            }
            for (r, c, v) in self.p.triplets().filter(|&(r, c, _)| r > c) {
                if self.p.get(c, r).is_none() && v != T::zero() {
                    out.push(Violation::Asymmetric { row: c, col: r });
                }
            }
        }

        for (what, vals) in [("q", &self.q), ("g", &self.g)] {
            if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
                out.push(Violation::NonFinite { what, index: i });
            }
        }
        for (what, mat) in [("P", &self.p), ("H", &self.h)] {
            if let Some(k) = mat.triplets().position(|(_, _, v)| !v.is_finite()) {
                out.push(Violation::NonFinite { what, index: k });
            }
        }

        for (i, (&lo, &hi)) in self.set.lower().iter().zip(self.set.upper()).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo == T::infinity() || hi == T::neg_infinity() {
                out.push(Violation::InvalidBound { index: i });
            } else if lo > hi {
                out.push(Violation::BoundsReversed { index: i });
            }
        }
        out
    }

    /// Converts all data to another scalar type.
    pub fn cast<U: Scalar>(&self) -> ConicQp<U> {
        ConicQp {
            p: self.p.cast(),
            q: self.q.iter().map(|v| U::lit(v.as_f64())).collect(),
            h: self.h.cast(),
            g: self.g.iter().map(|v| U::lit(v.as_f64())).collect(),
            cone: self.cone.clone(),
            set: self.set.cast(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_qp(lo: f64, hi: f64) -> ConicQp<f64> {
        ConicQp::new(
            SparseMatrix::identity(1),
            vec![0.0],
            SparseMatrix::zeros(0, 1),
            vec![],
            ConeSpec::zero(0),
            BoxProduct::new(vec![lo], vec![hi]).unwrap(),
        )
    }

    #[test]
    fn minimal_instance_is_well_formed() {
        assert!(scalar_qp(-1.0, 1.0).validate().is_empty());
    }

    #[test]
    fn reversed_bounds_reported() {
        let report = scalar_qp(2.0, 1.0).validate();
        assert_eq!(report, vec![Violation::BoundsReversed { index: 0 }]);
        assert_eq!(report[0].to_string(), "bounds reversed at coordinate 0");
    }

    #[test]
    fn asymmetry_reported() {
        let p = SparseMatrix::from_triplets(
            2,
            2,
            vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 0.5), (1, 1, 1.0)],
        )
        .unwrap();
        let qp = ConicQp::new(
            p,
            vec![0.0; 2],
            SparseMatrix::zeros(0, 2),
            vec![],
            ConeSpec::zero(0),
            BoxProduct::free(2),
        );
        assert_eq!(
            qp.validate(),
            vec![Violation::Asymmetric { row: 0, col: 1 }]
        );

        let lower_only = SparseMatrix::from_triplets(2, 2, vec![(1, 0, 0.5)]).unwrap();
        let qp = ConicQp::new(
            lower_only,
            vec![0.0; 2],
            SparseMatrix::zeros(0, 2),
            vec![],
            ConeSpec::zero(0),
            BoxProduct::free(2),
        );
        assert_eq!(
            qp.validate(),
            vec![Violation::Asymmetric { row: 0, col: 1 }]
        );
    }

    #[test]
    fn dimension_and_cone_mismatch() {
        let qp = ConicQp::new(
            SparseMatrix::identity(2),
            vec![0.0; 2],
            SparseMatrix::<f64>::zeros(1, 3),
            vec![0.0],
            ConeSpec::new(vec![ConeBlock::Nonneg(2)]),
            BoxProduct::free(2),
        );
        let report = qp.validate();
        assert!(report.contains(&Violation::DimensionMismatch {
            what: "H cols",
            expected: 2,
            found: 3
        }));
        assert!(report.contains(&Violation::ConeDimMismatch {
            expected: 1,
            found: 2
        }));
    }

    #[test]
    fn cone_ranges_are_contiguous() {
        let k = ConeSpec::new(vec![
            ConeBlock::Zero(2),
            ConeBlock::SecondOrder(3),
            ConeBlock::Nonneg(1),
        ]);
        let r: Vec<_> = k.ranges().map(|(_, r)| r).collect();
        assert_eq!(r, vec![0..2, 2..5, 5..6]);
        assert_eq!(k.dim(), 6);
        assert!(!k.is_zero_cone());
    }
}
