//! Two-point boundary-value control of a chain of oscillating masses, cast as
//! a conic QP with a zero cone and a box.
//!
//! Variables are ordered `z = (x₀, …, x_τ, u₀, …, u_{τ−1})`, states
//! time-major. Row block `t` of `H` encodes `x_{t+1} − A x_t − B u_t = 0`.

use crate::dynamics::build_dynamics;
use crate::error::ModelError;
use crate::model::{BoxProduct, ConeSpec, ConicQp};
use crate::rng::SeededStream;
use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;

pub const DEFAULT_PERIOD: f64 = 0.1;
pub const DEFAULT_STATE_BOUND: f64 = 1.0;
pub const DEFAULT_INPUT_BOUND: f64 = 0.5;
/// Standard deviation used when sampling initial states.
pub const DEFAULT_SIGMA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct OscMassParams<T> {
    pub masses: usize,
    pub horizon: usize,
    pub period: T,
    pub state_bound: T,
    pub input_bound: T,
    pub initial_state: Vec<T>,
}

impl<T: Scalar> OscMassParams<T> {
    /// Default period and bounds.
    pub fn new(masses: usize, horizon: usize, initial_state: Vec<T>) -> Self {
        Self {
            masses,
            horizon,
            period: T::lit(DEFAULT_PERIOD),
            state_bound: T::lit(DEFAULT_STATE_BOUND),
            input_bound: T::lit(DEFAULT_INPUT_BOUND),
            initial_state,
        }
    }

    pub fn check(&self) -> Result<(), ModelError> {
        let bad = |s: &str| Err(ModelError::InvalidParameter(s.to_string()));
        if self.masses < 1 {
            return bad("mass count must be at least 1");
        }
        if self.horizon < 2 {
            return bad("horizon must be at least 2");
        }
        if !(self.period > T::zero()) {
            return bad("sampling period must be positive");
        }
        if !(self.state_bound > T::zero()) || !(self.input_bound > T::zero()) {
            return bad("state and input bounds must be positive");
        }
        if self.initial_state.len() != 2 * self.masses {
            return Err(ModelError::LengthMismatch {
                what: "initial state",
                expected: 2 * self.masses,
                found: self.initial_state.len(),
            });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        3 * self.horizon * self.masses + 2 * self.masses
    }

    pub fn m(&self) -> usize {
        2 * self.horizon * self.masses
    }

    /// Column of state `x_t`.
    pub fn state_offset(&self, t: usize) -> usize {
        2 * self.masses * t
    }

    /// Column of input `u_t`.
    pub fn input_offset(&self, t: usize) -> usize {
        2 * self.masses * (self.horizon + 1) + self.masses * t
    }
}

/// Assembles the benchmark instance. `P = I`, `q = 0`, `g = 0`, `K = {0}`;
/// `x₀` and `x_τ` are pinned through singleton box coordinates.
pub fn oscillating_masses<T: Scalar>(p: &OscMassParams<T>) -> Result<ConicQp<T>, ModelError> {
    p.check()?;
    let l = p.masses;
    let tau = p.horizon;
    let nx = 2 * l;
    let (n, m) = (p.n(), p.m());
    let (a, b) = build_dynamics(l, p.period);

    let mut trip = Vec::new();
    for t in 0..tau {
        let row0 = nx * t;
        let xt = p.state_offset(t);
        let xn = p.state_offset(t + 1);
        let ut = p.input_offset(t);
        for i in 0..nx {
            let r = row0 + i;
            for j in 0..nx {
                let v = -a.at(i, j);
                if v != T::zero() {
                    trip.push((r, xt + j, v));
                }
            }
            trip.push((r, xn + i, T::one()));
            for j in 0..l {
                let v = -b.at(i, j);
                if v != T::zero() {
                    trip.push((r, ut + j, v));
                }
            }
        }
    }
    let h = SparseMatrix::from_triplets(m, n, trip)?;

    let mut lower = vec![T::zero(); n];
    let mut upper = vec![T::zero(); n];
    lower[..nx].copy_from_slice(&p.initial_state);
    upper[..nx].copy_from_slice(&p.initial_state);
    for i in p.state_offset(1)..p.state_offset(tau) {
        lower[i] = -p.state_bound;
        upper[i] = p.state_bound;
    }
    // x_τ stays pinned at zero
    for i in p.input_offset(0)..n {
        lower[i] = -p.input_bound;
        upper[i] = p.input_bound;
    }

    Ok(ConicQp::new(
        SparseMatrix::identity(n),
        vec![T::zero(); n],
        h,
        vec![T::zero(); m],
        ConeSpec::zero(m),
        BoxProduct::new(lower, upper)?,
    ))
}

/// Draws `x̂₀ ~ N([γ·1; 0], σ²I)` from the seeded stream.
pub fn sample_initial_state<T: Scalar>(l: usize, gamma: f64, sigma: f64, seed: u64) -> Vec<T> {
    assert!(sigma >= 0.0, "standard deviation must be nonnegative");
    let mut rng = SeededStream::new(seed);
    (0..2 * l)
        .map(|i| {
            let mean = if i < l { gamma } else { 0.0 };
            T::lit(mean + sigma * rng.normal())
        })
        .collect()
}

/// Convenience wrapper: sample `x̂₀` and build the instance with default bounds.
pub fn benchmark_instance<T: Scalar>(
    l: usize,
    horizon: usize,
    gamma: f64,
    sigma: f64,
    seed: u64,
) -> Result<ConicQp<T>, ModelError> {
    if !(sigma >= 0.0 && sigma.is_finite() && gamma.is_finite()) {
        return Err(ModelError::InvalidParameter(format!(
            "gamma {gamma} and sigma {sigma} must be finite, sigma nonnegative"
        )));
    }
    let x0 = sample_initial_state(l, gamma, sigma, seed);
    oscillating_masses(&OscMassParams::new(l, horizon, x0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Dense;
    use crate::scalar::norm_inf;

    #[test]
    fn smallest_instance_layout() {
        let p = OscMassParams::new(1, 2, vec![0.3, -0.1]);
        let qp = oscillating_masses(&p).unwrap();
        assert_eq!((qp.n(), qp.m()), (8, 4));
        assert!(qp.validate().is_empty());
        assert_eq!(qp.p(), &SparseMatrix::identity(8));
        assert!(qp.q().iter().all(|&v| v == 0.0));
        assert!(qp.g().iter().all(|&v| v == 0.0));

        let (a, b) = build_dynamics(1, 0.1);
        let dense = qp.h().to_dense();
        let at = |r: usize, c: usize| dense[r * 8 + c];
        // [ [0 I] − [I⊗A 0] | −I⊗B ]
        let mut expect = Dense::<f64>::zeros(4, 8);
        for t in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    expect.set(2 * t + i, 2 * t + j, -a.at(i, j));
                }
                expect.set(2 * t + i, 2 * t + 2 + i, 1.0);
                expect.set(2 * t + i, 6 + t, -b.at(i, 0));
            }
        }
        for r in 0..4 {
            for c in 0..8 {
                assert_eq!(at(r, c), expect.at(r, c), "H[{r},{c}]");
            }
        }

        let set = qp.set();
        assert_eq!(&set.lower()[..2], &[0.3, -0.1]);
        assert_eq!(&set.upper()[..2], &[0.3, -0.1]);
        assert_eq!(&set.lower()[2..4], &[-1.0, -1.0]);
        assert_eq!(&set.lower()[4..6], &[0.0, 0.0]);
        assert_eq!(&set.upper()[4..6], &[0.0, 0.0]);
        assert_eq!(&set.upper()[6..], &[0.5, 0.5]);
    }

    #[test]
    fn rows_touch_only_their_stage() {
        let p = OscMassParams::new(3, 5, vec![0.1; 6]);
        let qp = oscillating_masses(&p).unwrap();
        assert_eq!((qp.n(), qp.m()), (3 * 5 * 3 + 6, 2 * 5 * 3));
        for t in 0..5 {
            let allowed = |c: usize| {
                (p.state_offset(t)..p.state_offset(t + 2)).contains(&c)
                    || (p.input_offset(t)..p.input_offset(t) + 3).contains(&c)
            };
            for r in 6 * t..6 * (t + 1) {
                assert!(qp.h().row_cols(r).iter().all(|&c| allowed(c)));
            }
        }
    }

    #[test]
    fn rolled_out_trajectories_satisfy_dynamics() {
        for (l, tau, seed) in [(1, 2, 1u64), (2, 6, 2), (4, 20, 3)] {
            let x0: Vec<f64> = sample_initial_state(l, 0.1, 0.05, seed);
            let p = OscMassParams::new(l, tau, x0.clone());
            let qp = oscillating_masses(&p).unwrap();
            let (a, b) = build_dynamics(l, 0.1);
            let mut rng = SeededStream::new(seed + 100);
            let mut z = vec![0.0; p.n()];
            z[..2 * l].copy_from_slice(&x0);
            for t in 0..tau {
                let u: Vec<f64> = (0..l).map(|_| rng.uniform_in(-0.5, 0.5)).collect();
                z[p.input_offset(t)..p.input_offset(t) + l].copy_from_slice(&u);
                for i in 0..2 * l {
                    let mut v = 0.0;
                    for j in 0..2 * l {
                        v += a.at(i, j) * z[p.state_offset(t) + j];
                    }
                    for (j, uj) in u.iter().enumerate() {
                        v += b.at(i, j) * uj;
                    }
                    z[p.state_offset(t + 1) + i] = v;
                }
            }
            assert!(norm_inf(&qp.h().mul_vec(&z)) <= 1e-10);
        }
    }

    #[test]
    fn degenerate_sampling_is_the_mean() {
        let x: Vec<f64> = sample_initial_state(3, 0.1, 0.0, 9);
        assert_eq!(x, vec![0.1, 0.1, 0.1, 0.0, 0.0, 0.0]);
        let a: Vec<f64> = sample_initial_state(3, 0.8, 0.05, 9);
        let b: Vec<f64> = sample_initial_state(3, 0.8, 0.05, 9);
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(oscillating_masses(&OscMassParams::new(0, 3, Vec::<f64>::new())).is_err());
        assert!(oscillating_masses(&OscMassParams::new(1, 1, vec![0.0, 0.0])).is_err());
        assert!(oscillating_masses(&OscMassParams::new(2, 3, vec![0.0, 0.0])).is_err());
        let mut p = OscMassParams::new(1, 3, vec![0.0, 0.0]);
        p.input_bound = 0.0;
        assert!(oscillating_masses(&p).is_err());
    }
}
