//! Projections onto `D` and `K`, the polar cone, support functions and the
//! closed-form infimum of a linear function over a box.
//!
//! Extended reals are IEEE infinities. Products of a zero coefficient with an
//! infinite bound are taken to be zero, which keeps the support function and
//! the infimum total.

use crate::model::{BoxProduct, ConeBlock, ConeSpec};
use crate::scalar::{dot, Scalar};
use crate::sparse::SparseMatrix;

/// Reusable scratch space for [`inf_linear_over_box_with`].
#[derive(Debug, Clone, Default)]
pub struct ProjectionWorkspace<T> {
    scratch: Vec<T>,
}

impl<T: Scalar> ProjectionWorkspace<T> {
    pub fn new(len: usize) -> Self {
        Self {
            scratch: vec![T::zero(); len],
        }
    }

    fn buffer(&mut self, len: usize) -> &mut [T] {
        if self.scratch.len() < len {
            self.scratch.resize(len, T::zero());
        }
        &mut self.scratch[..len]
    }
}

#[inline]
fn clamp<T: Scalar>(v: T, lo: T, hi: T) -> T {
    // singleton bounds must return the bound exactly
    if v < lo {
        lo
    } else if v > hi {
        hi
    } else {
        v
    }
}

pub fn project_box_in_place<T: Scalar>(z: &mut [T], set: &BoxProduct<T>) {
    assert_eq!(z.len(), set.len());
    for ((v, &lo), &hi) in z.iter_mut().zip(set.lower()).zip(set.upper()) {
        *v = clamp(*v, lo, hi);
    }
}

/// Euclidean projection onto the box: a per-coordinate clamp.
pub fn project_box<T: Scalar>(z: &[T], set: &BoxProduct<T>) -> Vec<T> {
    let mut out = z.to_vec();
    project_box_in_place(&mut out, set);
    out
}

fn project_soc_in_place<T: Scalar>(y: &mut [T]) {
    let (t, x) = y
        .split_first_mut()
        .expect("second-order block has dimension >= 1");
    let nx = x.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
    if nx <= *t {
        return;
    }
    if nx <= -*t {
        *t = T::zero();
        x.iter_mut().for_each(|v| *v = T::zero());
        return;
    }
    let c = (*t + nx) / T::lit(2.0);
    *t = c;
    let s = c / nx;
    x.iter_mut().for_each(|v| *v = *v * s);
}

pub fn project_cone_in_place<T: Scalar>(y: &mut [T], cone: &ConeSpec) {
    assert_eq!(y.len(), cone.dim());
    for (block, range) in cone.ranges() {
        let seg = &mut y[range];
        match block {
            ConeBlock::Zero(_) => seg.iter_mut().for_each(|v| *v = T::zero()),
            ConeBlock::Nonneg(_) => seg.iter_mut().for_each(|v| *v = v.max(T::zero())),
            ConeBlock::SecondOrder(_) => project_soc_in_place(seg),
        }
    }
}

/// Euclidean projection onto `K`, block by block.
pub fn project_cone<T: Scalar>(y: &[T], cone: &ConeSpec) -> Vec<T> {
    let mut out = y.to_vec();
    project_cone_in_place(&mut out, cone);
    out
}

/// Projection onto the polar cone via `w = π_K(w) + π_{K°}(w)`.
///
/// Zero blocks pass through untouched and nonnegative blocks use `min(w, 0)`
/// directly, so those blocks carry no rounding from the decomposition.
pub fn project_polar_in_place<T: Scalar>(w: &mut [T], cone: &ConeSpec) {
    assert_eq!(w.len(), cone.dim());
    for (block, range) in cone.ranges() {
        let seg = &mut w[range];
        match block {
            ConeBlock::Zero(_) => {}
            ConeBlock::Nonneg(_) => seg.iter_mut().for_each(|v| *v = v.min(T::zero())),
            ConeBlock::SecondOrder(_) => {
                let mut k = seg.to_vec();
                project_soc_in_place(&mut k);
                seg.iter_mut().zip(&k).for_each(|(v, &p)| *v = *v - p);
            }
        }
    }
}

pub fn project_polar<T: Scalar>(w: &[T], cone: &ConeSpec) -> Vec<T> {
    let mut out = w.to_vec();
    project_polar_in_place(&mut out, cone);
    out
}

/// `σ_D(v) = sup_{y ∈ D} ⟨y, v⟩`; `+∞` when `v` points along an unbounded
/// direction.
pub fn support_box<T: Scalar>(set: &BoxProduct<T>, v: &[T]) -> T {
    assert_eq!(v.len(), set.len());
    let mut acc = T::zero();
    for ((&vi, &lo), &hi) in v.iter().zip(set.lower()).zip(set.upper()) {
        let term = if vi > T::zero() {
            hi * vi
        } else if vi < T::zero() {
            lo * vi
        } else {
            T::zero()
        };
        acc = acc + term;
    }
    acc
}

fn inf_over_box<T: Scalar>(set: &BoxProduct<T>, u: &[T]) -> T {
    let mut acc = T::zero();
    for ((&ui, &lo), &hi) in u.iter().zip(set.lower()).zip(set.upper()) {
        let term = if ui > T::zero() {
            lo * ui
        } else if ui < T::zero() {
            hi * ui
        } else {
            T::zero()
        };
        acc = acc + term;
    }
    acc
}

/// `inf_{z ∈ D} ⟨Hz − g, v⟩`, computed coordinatewise from `u = Hᵀv`.
pub fn inf_linear_over_box<T: Scalar>(
    h: &SparseMatrix<T>,
    g: &[T],
    set: &BoxProduct<T>,
    v: &[T],
) -> T {
    let mut ws = ProjectionWorkspace::new(h.cols());
    inf_linear_over_box_with(&mut ws, h, g, set, v)
}

pub fn inf_linear_over_box_with<T: Scalar>(
    ws: &mut ProjectionWorkspace<T>,
    h: &SparseMatrix<T>,
    g: &[T],
    set: &BoxProduct<T>,
    v: &[T],
) -> T {
    assert_eq!(v.len(), g.len());
    let u = ws.buffer(h.cols());
    h.mul_t_vec_into(v, u);
    inf_over_box(set, u) - dot(g, v)
}

/// Recession cone of a box: bounded sides collapse to zero.
pub fn recession_box<T: Scalar>(set: &BoxProduct<T>) -> BoxProduct<T> {
    let (lower, upper) = set
        .lower()
        .iter()
        .zip(set.upper())
        .map(|(&lo, &hi)| {
            let rl = if lo.is_finite() {
                T::zero()
            } else {
                T::neg_infinity()
            };
            let ru = if hi.is_finite() {
                T::zero()
            } else {
                T::infinity()
            };
            (rl, ru)
        })
        .unzip();
    BoxProduct::new(lower, upper).expect("lengths agree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bx(lo: &[f64], hi: &[f64]) -> BoxProduct<f64> {
        BoxProduct::new(lo.to_vec(), hi.to_vec()).unwrap()
    }

    const INF: f64 = f64::INFINITY;

    #[test]
    fn box_examples() {
        let b = BoxProduct::uniform(2, -1.0, 1.0);
        assert_eq!(project_box(&[3.0, -2.0], &b), vec![1.0, -1.0]);
        assert_eq!(project_box(&[0.25, -0.5], &b), vec![0.25, -0.5]);
        let s = bx(&[0.3], &[0.3]);
        for z in [-7.0, 0.3, 1e9] {
            assert_eq!(project_box(&[z], &s), vec![0.3]);
        }
    }

    #[test]
    fn cone_examples() {
        assert_eq!(
            project_cone(&[1.0, -2.0, 5.0], &ConeSpec::zero(3)),
            vec![0.0; 3]
        );
        let nn = ConeSpec::new(vec![ConeBlock::Nonneg(2)]);
        assert_eq!(project_cone(&[-1.0, 2.0], &nn), vec![0.0, 2.0]);
        let soc = ConeSpec::new(vec![ConeBlock::SecondOrder(2)]);
        // nearest point of {|x| <= t} to (0, 1) lies on the ray t = x
        assert_eq!(project_cone(&[0.0, 1.0], &soc), vec![0.5, 0.5]);
        assert_eq!(project_cone(&[2.0, 1.0], &soc), vec![2.0, 1.0]);
        assert_eq!(project_cone(&[-2.0, 1.0], &soc), vec![0.0, 0.0]);
    }

    #[test]
    fn polar_examples() {
        let w = [3.0, -1.0, 0.5];
        assert_eq!(project_polar(&w, &ConeSpec::zero(3)), w.to_vec());
        let nn = ConeSpec::new(vec![ConeBlock::Nonneg(2)]);
        assert_eq!(project_polar(&[-1.0, 2.0], &nn), vec![-1.0, 0.0]);
    }

    #[test]
    fn support_examples() {
        let b = BoxProduct::uniform(2, -1.0, 1.0);
        assert_eq!(support_box(&b, &[2.0, -3.0]), 5.0);
        let pt = bx(&[1.5, -2.0], &[1.5, -2.0]);
        assert_eq!(support_box(&pt, &[2.0, 3.0]), 1.5 * 2.0 - 2.0 * 3.0);
        let free = BoxProduct::<f64>::free(2);
        assert_eq!(support_box(&free, &[1.0, 0.0]), INF);
        assert_eq!(support_box(&free, &[0.0, 0.0]), 0.0);
    }

    #[test]
    fn infimum_examples() {
        let b = BoxProduct::uniform(2, -1.0, 1.0);
        let h = SparseMatrix::identity(2);
        assert_eq!(inf_linear_over_box(&h, &[0.0, 0.0], &b, &[2.0, -3.0]), -5.0);
        assert_eq!(inf_linear_over_box(&h, &[0.7, 0.1], &b, &[0.0, 0.0]), 0.0);

        // endpoints of [1, 2] under v = 1: min(1·1, 2·1) = 1
        let h1 = SparseMatrix::identity(1);
        let b1 = bx(&[1.0], &[2.0]);
        let endpoints = [1.0f64, 2.0].iter().map(|z| z * 1.0).fold(INF, f64::min);
        assert_eq!(inf_linear_over_box(&h1, &[0.0], &b1, &[1.0]), endpoints);

        let half = bx(&[0.0], &[INF]);
        assert_eq!(inf_linear_over_box(&h1, &[0.0], &half, &[-1.0]), -INF);
    }

    #[test]
    fn recession_examples() {
        let r = recession_box(&bx(&[-1.0, 0.0, -INF, -INF], &[1.0, INF, 3.0, INF]));
        assert_eq!(r.lower(), &[0.0, 0.0, -INF, -INF]);
        assert_eq!(r.upper(), &[0.0, INF, 0.0, INF]);
    }

    fn mixed_cone() -> ConeSpec {
        ConeSpec::new(vec![
            ConeBlock::Zero(1),
            ConeBlock::Nonneg(2),
            ConeBlock::SecondOrder(3),
            ConeBlock::SecondOrder(1),
        ])
    }

    fn vec7() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, 7)
    }

    fn firm_slack(pa: &[f64], pb: &[f64], a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = pa.iter().zip(pb).map(|(x, y)| x - y).collect();
        let e: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        dot(&d, &e) - dot(&d, &d)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn cone_projection_is_idempotent_and_firmly_nonexpansive(a in vec7(), b in vec7()) {
            let k = mixed_cone();
            let pa = project_cone(&a, &k);
            let pb = project_cone(&b, &k);
            let ppa = project_cone(&pa, &k);
            for (x, y) in pa.iter().zip(&ppa) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
            }
            prop_assert!(firm_slack(&pa, &pb, &a, &b) >= -1e-12 * (1.0 + dot(&a, &a) + dot(&b, &b)));
        }

        #[test]
        fn box_projection_is_idempotent_and_firmly_nonexpansive(
            a in vec7(),
            b in vec7(),
            lo in prop::collection::vec(-5.0f64..0.0, 7),
            width in prop::collection::vec(0.0f64..5.0, 7),
        ) {
            let hi: Vec<f64> = lo.iter().zip(&width).map(|(l, w)| l + w).collect();
            let set = BoxProduct::new(lo, hi).unwrap();
            let pa = project_box(&a, &set);
            let pb = project_box(&b, &set);
            prop_assert_eq!(project_box(&pa, &set), pa.clone());
            prop_assert!(firm_slack(&pa, &pb, &a, &b) >= -1e-12);
        }

        #[test]
        fn moreau_decomposition(w in vec7()) {
            let k = mixed_cone();
            let pk = project_cone(&w, &k);
            let pp = project_polar(&w, &k);
            for i in 0..w.len() {
                prop_assert!((pk[i] + pp[i] - w[i]).abs() <= 1e-14 * (1.0 + w[i].abs()));
            }
            prop_assert!(dot(&pk, &pp).abs() <= 1e-10 * dot(&w, &w).max(1e-300));
            // polar part is in K°: it projects to zero on K
            let back = project_cone(&pp, &k);
            prop_assert!(back.iter().all(|v| v.abs() <= 1e-12 * (1.0 + dot(&w, &w).sqrt())));
        }

        #[test]
        fn infimum_is_negated_support(
            lo in prop::collection::vec(-3.0f64..0.0, 4),
            width in prop::collection::vec(0.0f64..3.0, 4),
            hd in prop::collection::vec(-2.0f64..2.0, 12),
            g in prop::collection::vec(-1.0f64..1.0, 3),
            v in prop::collection::vec(-1.0f64..1.0, 3),
        ) {
            let hi: Vec<f64> = lo.iter().zip(&width).map(|(l, w)| l + w).collect();
            let set = BoxProduct::new(lo, hi).unwrap();
            let h = SparseMatrix::from_dense(3, 4, &hd);
            let lhs = inf_linear_over_box(&h, &g, &set, &v);
            let neg_u: Vec<f64> = h.mul_t_vec(&v).iter().map(|x| -x).collect();
            let rhs = -support_box(&set, &neg_u) - dot(&g, &v);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }
}
