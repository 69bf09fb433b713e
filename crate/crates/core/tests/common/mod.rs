#![allow(dead_code)]

use xpipg::rng::SeededStream;
use xpipg::{BoxProduct, ConeBlock, ConeSpec, ConicQp64, SparseMatrix};

/// `AᵀA + shift·I` for a random `k × n` matrix `A`; exactly symmetric.
pub fn random_psd(rng: &mut SeededStream, n: usize, k: usize, shift: f64) -> Vec<f64> {
    let a: Vec<f64> = (0..k * n).map(|_| rng.normal()).collect();
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..k).map(|r| a[r * n + i] * a[r * n + j]).sum();
            p[i * n + j] = s + if i == j { shift } else { 0.0 };
        }
    }
    p
}

/// Dense random matrix with roughly `density` of its entries nonzero.
pub fn random_dense(rng: &mut SeededStream, rows: usize, cols: usize, density: f64) -> Vec<f64> {
    (0..rows * cols)
        .map(|_| {
            if rng.uniform() < density {
                rng.normal()
            } else {
                0.0
            }
        })
        .collect()
}

pub fn random_box(rng: &mut SeededStream, n: usize) -> BoxProduct<f64> {
    let lo: Vec<f64> = (0..n).map(|_| rng.uniform_in(-2.0, 0.0)).collect();
    let hi: Vec<f64> = lo.iter().map(|l| l + rng.uniform_in(0.5, 3.0)).collect();
    BoxProduct::new(lo, hi).unwrap()
}

/// Strictly convex QP over a random box with `m` equality rows satisfied by
/// an interior point of the box.
pub fn tiny_feasible(seed: u64) -> ConicQp64 {
    let mut rng = SeededStream::new(seed);
    let n = 2 + rng.below(7);
    let m = 1 + rng.below(4.min(n - 1));
    let p = random_psd(&mut rng, n, n, 0.1);
    let q: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    let set = random_box(&mut rng, n);
    let mut h = random_dense(&mut rng, m, n, 0.8);
    for r in 0..m {
        // keep every row nonzero
        h[r * n + r % n] += 1.0;
    }
    let z0: Vec<f64> = (0..n)
        .map(|i| set.lower()[i] + rng.uniform_in(0.2, 0.8) * (set.upper()[i] - set.lower()[i]))
        .collect();
    let g: Vec<f64> = (0..m)
        .map(|r| (0..n).map(|c| h[r * n + c] * z0[c]).sum())
        .collect();
    ConicQp64::new(
        SparseMatrix::from_dense(n, n, &p),
        q,
        SparseMatrix::from_dense(m, n, &h),
        g,
        ConeSpec::zero(m),
        set,
    )
}

/// As [`tiny_feasible`], with one row's target moved beyond what the box
/// can reach.
pub fn tiny_infeasible(seed: u64) -> ConicQp64 {
    let qp = tiny_feasible(seed);
    let mut rng = SeededStream::new(seed ^ 0xdead_beef);
    let row = rng.below(qp.m());
    let h = qp.h().to_dense();
    let n = qp.n();
    let reach: f64 = (0..n)
        .map(|c| {
            let v = h[row * n + c];
            (v * qp.set().lower()[c]).max(v * qp.set().upper()[c])
        })
        .sum();
    let mut g = qp.g().to_vec();
    g[row] = reach + rng.uniform_in(0.5, 2.0);
    ConicQp64::new(
        qp.p().clone(),
        qp.q().to_vec(),
        qp.h().clone(),
        g,
        qp.cone().clone(),
        qp.set().clone(),
    )
}

/// Random conic QP with a positive semidefinite, possibly singular `P`,
/// a mix of cone blocks, and some unbounded coordinates.
pub fn random_conic(seed: u64) -> ConicQp64 {
    let mut rng = SeededStream::new(seed);
    let n = 1 + rng.below(6);
    let mut blocks = Vec::new();
    let mut m = 0;
    for _ in 0..rng.below(3) {
        let b = match rng.below(3) {
            0 => ConeBlock::Zero(1 + rng.below(2)),
            1 => ConeBlock::Nonneg(1 + rng.below(2)),
            _ => ConeBlock::SecondOrder(2 + rng.below(2)),
        };
        m += b.dim();
        blocks.push(b);
    }
    let rank = rng.below(n + 1);
    let p = random_psd(&mut rng, n, rank, 0.0);
    let q: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    let h = random_dense(&mut rng, m, n, 0.7);
    let g: Vec<f64> = (0..m).map(|_| rng.normal()).collect();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for _ in 0..n {
        let l = if rng.uniform() < 0.2 {
            f64::NEG_INFINITY
        } else {
            rng.uniform_in(-2.0, 0.0)
        };
        let u = if rng.uniform() < 0.2 {
            f64::INFINITY
        } else {
            rng.uniform_in(0.0, 2.0)
        };
        lo.push(l);
        hi.push(u);
    }
    ConicQp64::new(
        SparseMatrix::from_dense(n, n, &p),
        q,
        SparseMatrix::from_dense(m, n, &h),
        g,
        ConeSpec::new(blocks),
        BoxProduct::new(lo, hi).unwrap(),
    )
}

pub fn random_point(rng: &mut SeededStream, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| scale * rng.normal()).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

/// `min ½z² s.t. z = 0, z ∈ [1, 2]`.
pub fn infeasible_1d() -> ConicQp64 {
    ConicQp64::new(
        SparseMatrix::identity(1),
        vec![0.0],
        SparseMatrix::identity(1),
        vec![0.0],
        ConeSpec::zero(1),
        BoxProduct::new(vec![1.0], vec![2.0]).unwrap(),
    )
}

/// `min −z` over the real line.
pub fn unbounded_1d() -> ConicQp64 {
    ConicQp64::new(
        SparseMatrix::zeros(1, 1),
        vec![-1.0],
        SparseMatrix::zeros(0, 1),
        vec![],
        ConeSpec::zero(0),
        BoxProduct::free(1),
    )
}
