//! Dense reference computations used to check the solver on small
//! instances. Everything here is `f64`, brute force, and shares no code
//! with the solver path it checks beyond the problem types and the one-step
//! map whose properties are under test.

use crate::model::ConicQp;
use crate::projections::{project_box_in_place, project_polar_in_place};
use crate::rng::SeededStream;
use crate::solver::{iterate, SolverState};
use crate::spectral::StepSizes;

/// Pivots smaller than this in magnitude mark a system as singular.
pub const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        (0..n).for_each(|i| m.data[i * n + i] = 1.0);
        m
    }

    pub fn from_sparse(a: &crate::SparseMatrix<f64>) -> Self {
        Self {
            rows: a.rows(),
            cols: a.cols(),
            data: a.to_dense(),
        }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.at(r, c) * x[c]).sum())
            .collect()
    }

    pub fn matmul(&self, b: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, b.cols);
        for i in 0..self.rows {
            for j in 0..b.cols {
                out.set(
                    i,
                    j,
                    (0..self.cols).map(|k| self.at(i, k) * b.at(k, j)).sum(),
                );
            }
        }
        out
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.at(r, c));
            }
        }
        t
    }

    /// `xᵀ A x`
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        x.iter().zip(self.mul_vec(x)).map(|(a, b)| a * b).sum()
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let total: f64 = a.data.iter().map(|v| v * v).sum::<f64>().sqrt();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a.at(i, j).powi(2))
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * total.max(f64::MIN_POSITIVE) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a.at(p, q);
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.at(k, p);
                        let akq = a.at(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.at(p, k);
                        let aqk = a.at(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a.at(i, i)).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.symmetric_eigenvalues()
            .first()
            .copied()
            .unwrap_or(f64::INFINITY)
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.symmetric_eigenvalues()
            .iter()
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Largest singular value, from the eigenvalues of `AᵀA`.
    pub fn max_singular_value(&self) -> f64 {
        self.transpose()
            .matmul(self)
            .symmetric_eigenvalues()
            .last()
            .copied()
            .unwrap_or(0.0)
            .max(0.0)
            .sqrt()
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting. Returns
/// `None` when a pivot falls below [`PIVOT_TOL`].
pub fn solve_linear(a: &DenseMatrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows;
    assert_eq!(a.cols, n);
    assert_eq!(b.len(), n);
    let mut m = a.data.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv =
            (col..n).max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))?;
        if m[piv * n + col].abs() < PIVOT_TOL {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(piv * n + k, col * n + k);
            }
            x.swap(piv, col);
        }
        for r in col + 1..n {
            let f = m[r * n + col] / m[col * n + col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[r * n + k] -= f * m[col * n + k];
            }
            x[r] -= f * x[col];
        }
    }
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r * n + k] * x[k]).sum();
        x[r] = (x[r] - s) / m[r * n + r];
    }
    Some(x)
}

/// Discrete-time `(A, B)` of the spring–mass chain from its normal modes.
///
/// The stiffness matrix has eigenpairs `λ_k = 2 − 2cos(kπ/(l+1))`,
/// `v_k(i) = √(2/(l+1)) sin(ikπ/(l+1))`, so with `Ω = diag(√λ_k)`:
///
/// ```text
/// exp(tM) = [[V cos(Ωt) Vᵀ,     V Ω⁻¹ sin(Ωt) Vᵀ],
///            [−V Ω sin(Ωt) Vᵀ,  V cos(Ωt) Vᵀ    ]]
/// B       = [[V Ω⁻² (1 − cos(Ωt)) Vᵀ], [V Ω⁻¹ sin(Ωt) Vᵀ]]
/// ```
///
/// Returned row-major, `A` as `2l × 2l` and `B` as `2l × l`.
pub fn modal_dynamics(l: usize, dt: f64) -> (DenseMatrix, DenseMatrix) {
    let h = std::f64::consts::PI / (l + 1) as f64;
    let norm = (2.0 / (l + 1) as f64).sqrt();
    let v = |i: usize, k: usize| norm * (((i + 1) * (k + 1)) as f64 * h).sin();
    let freq: Vec<f64> = (0..l)
        .map(|k| (2.0 - 2.0 * ((k + 1) as f64 * h).cos()).sqrt())
        .collect();
    let modal = |f: &dyn Fn(f64) -> f64| {
        let mut out = DenseMatrix::zeros(l, l);
        for i in 0..l {
            for j in 0..l {
                out.set(i, j, (0..l).map(|k| v(i, k) * f(freq[k]) * v(j, k)).sum());
            }
        }
        out
    };
    let cos = modal(&|w| (w * dt).cos());
    let sin_over = modal(&|w| (w * dt).sin() / w);
    let sin_times = modal(&|w| -(w * dt).sin() * w);
    let one_minus_cos = modal(&|w| (1.0 - (w * dt).cos()) / (w * w));

    let mut a = DenseMatrix::zeros(2 * l, 2 * l);
    let mut b = DenseMatrix::zeros(2 * l, l);
    for i in 0..l {
        for j in 0..l {
            a.set(i, j, cos.at(i, j));
            a.set(i, l + j, sin_over.at(i, j));
            a.set(l + i, j, sin_times.at(i, j));
            a.set(l + i, l + j, cos.at(i, j));
            b.set(i, j, one_minus_cos.at(i, j));
            b.set(l + i, j, sin_over.at(i, j));
        }
    }
    (a, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activity {
    AtLower,
    AtUpper,
    Free,
}

/// Per-coordinate activity tags; bound tags only appear on finite bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSetPattern(pub Vec<Activity>);

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    Optimal {
        z: Vec<f64>,
        objective: f64,
        pattern: ActiveSetPattern,
    },
    /// No activity pattern is feasible and `direction` separates
    /// `{Hz − g : z ∈ D}` from zero by `margin > 0`.
    Infeasible { direction: Vec<f64>, margin: f64 },
    /// Every KKT system was singular, or no separating direction was found.
    Indeterminate,
}

pub const ORACLE_MAX_N: usize = 12;
const FEAS_TOL: f64 = 1e-9;

/// Exact solution of a small box- and equality-constrained QP by
/// enumerating activity patterns.
///
/// Needs every cone block to be a zero cone and `P` positive definite on the
/// free coordinates of the optimal pattern. For each pattern the bound
/// coordinates are fixed, the KKT system in the free coordinates and the
/// equality multipliers is solved densely, and the point is kept if it
/// respects the bounds and the bound multipliers have the right signs.
pub fn brute_force_qp(qp: &ConicQp<f64>) -> OracleOutcome {
    let n = qp.n();
    let m = qp.m();
    assert!(
        n <= ORACLE_MAX_N,
        "oracle enumerates at most 3^{ORACLE_MAX_N} patterns"
    );
    assert!(
        qp.cone().is_zero_cone(),
        "oracle handles equality constraints only"
    );
    let lower = qp.set().lower();
    let upper = qp.set().upper();
    let p = DenseMatrix::from_sparse(qp.p());
    let h = DenseMatrix::from_sparse(qp.h());

    let choices: Vec<Vec<Activity>> = (0..n)
        .map(|i| {
            if lower[i] == upper[i] {
                return vec![Activity::AtLower];
            }
            let mut c = vec![Activity::Free];
            if lower[i].is_finite() {
                c.push(Activity::AtLower);
            }
            if upper[i].is_finite() {
                c.push(Activity::AtUpper);
            }
            c
        })
        .collect();

    let mut best: Option<(f64, Vec<f64>, ActiveSetPattern)> = None;
    let mut any_nonsingular = false;
    let mut idx = vec![0usize; n];
    loop {
        let pattern: Vec<Activity> = (0..n).map(|i| choices[i][idx[i]]).collect();
        if let Some(res) = solve_pattern(qp, &p, &h, &pattern) {
            any_nonsingular = true;
            if let Some((z, obj)) = res {
                if best.as_ref().is_none_or(|b| obj < b.0) {
                    best = Some((obj, z, ActiveSetPattern(pattern)));
                }
            }
        }
        // odometer increment
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }

    if let Some((objective, z, pattern)) = best {
        return OracleOutcome::Optimal {
            z,
            objective,
            pattern,
        };
    }
    if !any_nonsingular && m == 0 {
        return OracleOutcome::Indeterminate;
    }
    let (direction, margin) = farkas_search(qp, 100_000, 0x5eed);
    if margin > 0.0 {
        OracleOutcome::Infeasible { direction, margin }
    } else {
        OracleOutcome::Indeterminate
    }
}

/// `None` for a singular system, `Some(None)` for a rejected pattern.
#[allow(clippy::option_option)]
fn solve_pattern(
    qp: &ConicQp<f64>,
    p: &DenseMatrix,
    h: &DenseMatrix,
    pattern: &[Activity],
) -> Option<Option<(Vec<f64>, f64)>> {
    let n = qp.n();
    let m = qp.m();
    let lower = qp.set().lower();
    let upper = qp.set().upper();
    let free: Vec<usize> = (0..n).filter(|&i| pattern[i] == Activity::Free).collect();
    let mut z = vec![0.0; n];
    for i in 0..n {
        match pattern[i] {
            Activity::AtLower => z[i] = lower[i],
            Activity::AtUpper => z[i] = upper[i],
            Activity::Free => {}
        }
    }
    let nf = free.len();
    let size = nf + m;
    let mut kkt = DenseMatrix::zeros(size, size);
    let mut rhs = vec![0.0; size];
    for (a, &i) in free.iter().enumerate() {
        for (b, &j) in free.iter().enumerate() {
            kkt.set(a, b, p.at(i, j));
        }
        for r in 0..m {
            kkt.set(a, nf + r, h.at(r, i));
            kkt.set(nf + r, a, h.at(r, i));
        }
        let fixed: f64 = (0..n)
            .filter(|&j| pattern[j] != Activity::Free)
            .map(|j| p.at(i, j) * z[j])
            .sum();
        rhs[a] = -qp.q()[i] - fixed;
    }
    for r in 0..m {
        let fixed: f64 = (0..n)
            .filter(|&j| pattern[j] != Activity::Free)
            .map(|j| h.at(r, j) * z[j])
            .sum();
        rhs[nf + r] = qp.g()[r] - fixed;
    }
    let sol = if size == 0 {
        Vec::new()
    } else {
        solve_linear(&kkt, &rhs)?
    };
    for (a, &i) in free.iter().enumerate() {
        z[i] = sol[a];
    }
    let nu = &sol[nf..];

    let scale = 1.0 + z.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if (0..n).any(|i| z[i] < lower[i] - FEAS_TOL * scale || z[i] > upper[i] + FEAS_TOL * scale) {
        return Some(None);
    }
    // gradient of the Lagrangian: Pz + q + Hᵀν
    let pz = p.mul_vec(&z);
    let grad: Vec<f64> = (0..n)
        .map(|i| pz[i] + qp.q()[i] + (0..m).map(|r| h.at(r, i) * nu[r]).sum::<f64>())
        .collect();
    let gscale = 1.0 + grad.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for i in 0..n {
        if lower[i] == upper[i] {
            continue;
        }
        let ok = match pattern[i] {
            Activity::AtLower => grad[i] >= -FEAS_TOL * gscale,
            Activity::AtUpper => grad[i] <= FEAS_TOL * gscale,
            Activity::Free => true,
        };
        if !ok {
            return Some(None);
        }
    }
    let hz = h.mul_vec(&z);
    if (0..m).any(|r| (hz[r] - qp.g()[r]).abs() > 1e-7 * scale) {
        return Some(None);
    }
    let objective = 0.5 * p.quad_form(&z) + qp.q().iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
    Some(Some((z, objective)))
}

/// `inf_{z ∈ D} ⟨Hz − g, v⟩` by taking the minimizing endpoint per coordinate.
pub fn box_infimum(qp: &ConicQp<f64>, h: &DenseMatrix, v: &[f64]) -> f64 {
    let lower = qp.set().lower();
    let upper = qp.set().upper();
    let mut total = -qp.g().iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    for i in 0..qp.n() {
        let u: f64 = (0..qp.m()).map(|r| h.at(r, i) * v[r]).sum();
        if u != 0.0 {
            total += (lower[i] * u).min(upper[i] * u);
        }
    }
    total
}

/// Maximizes `inf_{z ∈ D} ⟨Hz − g, v⟩` over unit `v` by dense random
/// sampling followed by a shrinking random local search. A positive maximum
/// certifies primal infeasibility.
pub fn farkas_search(qp: &ConicQp<f64>, samples: usize, seed: u64) -> (Vec<f64>, f64) {
    let m = qp.m();
    if m == 0 {
        return (Vec::new(), f64::NEG_INFINITY);
    }
    let h = DenseMatrix::from_sparse(qp.h());
    let mut rng = SeededStream::new(seed);
    let unit = |rng: &mut SeededStream| loop {
        let v: Vec<f64> = (0..m).map(|_| rng.normal()).collect();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-12 {
            return v.into_iter().map(|x| x / nv).collect::<Vec<f64>>();
        }
    };
    let mut best_v = unit(&mut rng);
    let mut best = box_infimum(qp, &h, &best_v);
    for _ in 1..samples {
        let v = unit(&mut rng);
        let val = box_infimum(qp, &h, &v);
        if val > best {
            best = val;
            best_v = v;
        }
    }
    let mut radius = 0.1;
    for _ in 0..5000 {
        let step = unit(&mut rng);
        let mut v: Vec<f64> = best_v
            .iter()
            .zip(&step)
            .map(|(a, b)| a + radius * b)
            .collect();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= nv);
        let val = box_infimum(qp, &h, &v);
        if val > best {
            best = val;
            best_v = v;
        } else {
            radius = (radius * 0.995).max(1e-8);
        }
    }
    (best_v, best)
}

/// `M = [[I/α − P, −Hᵀ], [−H, I/β]]`.
pub fn build_m(qp: &ConicQp<f64>, alpha: f64, beta: f64) -> DenseMatrix {
    let n = qp.n();
    let m = qp.m();
    let p = DenseMatrix::from_sparse(qp.p());
    let h = DenseMatrix::from_sparse(qp.h());
    let mut out = DenseMatrix::zeros(n + m, n + m);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, if i == j { 1.0 / alpha } else { 0.0 } - p.at(i, j));
        }
        for r in 0..m {
            out.set(i, n + r, -h.at(r, i));
            out.set(n + r, i, -h.at(r, i));
        }
    }
    for r in 0..m {
        out.set(n + r, n + r, 1.0 / beta);
    }
    out
}

/// One application of the solver's update to `ζ = (ξ, η)`.
pub fn apply_map(qp: &ConicQp<f64>, alpha: f64, beta: f64, rho: f64, zeta: &[f64]) -> Vec<f64> {
    let n = qp.n();
    let mut state = SolverState::from_start(qp, zeta[..n].to_vec(), zeta[n..].to_vec());
    iterate(&mut state, qp, StepSizes { alpha, beta }, rho);
    state.zeta()
}

/// Left minus right side of the averagedness inequality with `γ = ρ/2`:
///
/// ```text
/// ‖Tζ₁ − Tζ₂‖²_M − ‖ζ₁ − ζ₂‖²_M − ((γ − 1)/γ) ‖ζ₁ − ζ₂ − Tζ₁ + Tζ₂‖²_M
/// ```
///
/// using `M` from [`build_m`]. Non-positive up to rounding when the step
/// sizes satisfy `α(‖P‖ + β‖H‖²) < 1`.
pub fn averaged_inequality_residual(
    qp: &ConicQp<f64>,
    alpha: f64,
    beta: f64,
    rho: f64,
    zeta1: &[f64],
    zeta2: &[f64],
) -> f64 {
    averaged_inequality_residual_with(
        &build_m(qp, alpha, beta),
        qp,
        alpha,
        beta,
        rho,
        zeta1,
        zeta2,
    )
}

/// As [`averaged_inequality_residual`] with a caller supplied metric.
pub fn averaged_inequality_residual_with(
    metric: &DenseMatrix,
    qp: &ConicQp<f64>,
    alpha: f64,
    beta: f64,
    rho: f64,
    zeta1: &[f64],
    zeta2: &[f64],
) -> f64 {
    let t1 = apply_map(qp, alpha, beta, rho, zeta1);
    let t2 = apply_map(qp, alpha, beta, rho, zeta2);
    let d_in: Vec<f64> = zeta1.iter().zip(zeta2).map(|(a, b)| a - b).collect();
    let d_out: Vec<f64> = t1.iter().zip(&t2).map(|(a, b)| a - b).collect();
    let d_res: Vec<f64> = d_in.iter().zip(&d_out).map(|(a, b)| a - b).collect();
    let gamma = rho / 2.0;
    metric.quad_form(&d_out)
        - metric.quad_form(&d_in)
        - (gamma - 1.0) / gamma * metric.quad_form(&d_res)
}

/// Iterates of the unrelaxed method, written without the `(ξ, η)` pair:
///
/// ```text
/// z⁺ = π_D[z − α(Pz + q + Hᵀw)]
/// w⁺ = π_K°[w + β(H(2z⁺ − z) − g)]
/// ```
///
/// Returns the `(z, w)` sequence after each of `iterations` updates.
pub fn pipg_reference(
    qp: &ConicQp<f64>,
    alpha: f64,
    beta: f64,
    z0: &[f64],
    w0: &[f64],
    iterations: usize,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = qp.n();
    let m = qp.m();
    let mut z = z0.to_vec();
    let mut w = w0.to_vec();
    let mut pz = vec![0.0; n];
    let mut htw = vec![0.0; n];
    let mut ext = vec![0.0; n];
    let mut hx = vec![0.0; m];
    let mut out = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        qp.p().mul_vec_into(&z, &mut pz);
        qp.h().mul_t_vec_into(&w, &mut htw);
        let mut z_next: Vec<f64> = (0..n)
            .map(|i| z[i] - alpha * (pz[i] + qp.q()[i] + htw[i]))
            .collect();
        project_box_in_place(&mut z_next, qp.set());
        for i in 0..n {
            ext[i] = 2.0 * z_next[i] - z[i];
        }
        qp.h().mul_vec_into(&ext, &mut hx);
        let mut w_next: Vec<f64> = (0..m).map(|r| w[r] + beta * (hx[r] - qp.g()[r])).collect();
        project_polar_in_place(&mut w_next, qp.cone());
        z = z_next;
        w = w_next;
        out.push((z.clone(), w.clone()));
    }
    out
}
