//! Seeded sweeps over the oscillating-masses family.

use std::io::Write;
use std::time::Duration;

use rayon::prelude::*;

use crate::error::ModelError;
use crate::io::format_g17;
use crate::oscillating::{benchmark_instance, DEFAULT_SIGMA};
use crate::solver::{solve, SolveStatus, SolverConfig};

/// Column names of [`write_csv`], in order.
pub const CSV_HEADER: [&str; 11] = [
    "instance",
    "seed",
    "gamma",
    "rho",
    "omega",
    "status",
    "iterations",
    "dz",
    "dw",
    "residual",
    "wall_ms",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Position of the instance within its cell.
    pub instance: usize,
    pub seed: u64,
    pub gamma: f64,
    pub rho: f64,
    pub omega: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub dz: f64,
    pub dw: f64,
    /// Largest feasibility residual at termination.
    pub residual: f64,
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub masses: usize,
    pub horizon: usize,
    pub gammas: Vec<f64>,
    pub rhos: Vec<f64>,
    pub seeds: usize,
    pub first_seed: u64,
    pub sigma: f64,
    /// Everything except `rho`, which is taken from `rhos`.
    pub config: SolverConfig<f64>,
}

impl BenchSpec {
    pub fn new(
        masses: usize,
        horizon: usize,
        gammas: Vec<f64>,
        rhos: Vec<f64>,
        seeds: usize,
    ) -> Self {
        Self {
            masses,
            horizon,
            gammas,
            rhos,
            seeds,
            first_seed: 0,
            sigma: DEFAULT_SIGMA,
            config: SolverConfig::default(),
        }
    }
}

/// Solves every `(γ, ρ, seed)` combination. Rows come back grouped by cell
/// in `gammas × rhos` order and by seed within a cell, independent of how
/// the solves were scheduled.
pub fn run(spec: &BenchSpec) -> Result<Vec<RunRecord>, ModelError> {
    let jobs: Vec<(f64, f64, usize)> = spec
        .gammas
        .iter()
        .flat_map(|&g| {
            spec.rhos
                .iter()
                .flat_map(move |&r| (0..spec.seeds).map(move |i| (g, r, i)))
        })
        .collect();
    jobs.par_iter()
        .map(|&(gamma, rho, instance)| run_one(spec, gamma, rho, instance))
        .collect()
}

fn run_one(
    spec: &BenchSpec,
    gamma: f64,
    rho: f64,
    instance: usize,
) -> Result<RunRecord, ModelError> {
    let seed = spec.first_seed + instance as u64;
    let qp = benchmark_instance::<f64>(spec.masses, spec.horizon, gamma, spec.sigma, seed)?;
    let cfg = spec.config.clone().with_rho(rho);
    let result = solve(&qp, &cfg).map_err(|e| ModelError::InvalidParameter(e.to_string()))?;
    Ok(RunRecord {
        instance,
        seed,
        gamma,
        rho,
        omega: cfg.omega,
        status: result.status,
        iterations: result.stats.iterations,
        dz: result.stats.primal_displacement,
        dw: result.stats.dual_displacement,
        residual: result.stats.residuals.max(),
        wall: result.stats.elapsed,
    })
}

pub fn write_csv<W: Write>(out: W, records: &[RunRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.instance.to_string(),
            r.seed.to_string(),
            r.gamma.to_string(),
            r.rho.to_string(),
            r.omega.to_string(),
            r.status.as_str().to_string(),
            r.iterations.to_string(),
            format_g17(r.dz),
            format_g17(r.dw),
            format_g17(r.residual),
            format!("{:.3}", r.wall.as_secs_f64() * 1e3),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub gamma: f64,
    pub rho: f64,
    pub runs: usize,
    pub median_iterations: f64,
    /// Number of runs per status, in first-seen order.
    pub statuses: Vec<(SolveStatus, usize)>,
}

/// Groups consecutive records of the same `(γ, ρ)` cell.
pub fn summarize(records: &[RunRecord]) -> Vec<CellSummary> {
    let mut cells: Vec<CellSummary> = Vec::new();
    let mut iters: Vec<Vec<usize>> = Vec::new();
    for r in records {
        let same = cells
            .last()
            .is_some_and(|c| c.gamma == r.gamma && c.rho == r.rho);
        if !same {
            cells.push(CellSummary {
                gamma: r.gamma,
                rho: r.rho,
                runs: 0,
                median_iterations: 0.0,
                statuses: Vec::new(),
            });
            iters.push(Vec::new());
        }
        let cell = cells.last_mut().expect("pushed above");
        cell.runs += 1;
        match cell.statuses.iter_mut().find(|(s, _)| *s == r.status) {
            Some((_, count)) => *count += 1,
            None => cell.statuses.push((r.status, 1)),
        }
        iters.last_mut().expect("pushed above").push(r.iterations);
    }
    for (cell, its) in cells.iter_mut().zip(iters) {
        cell.median_iterations = median(its.into_iter().map(|v| v as f64).collect());
    }
    cells
}

/// Median with the mean of the middle pair for even counts; NaN when empty.
pub fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len() / 2;
    if values.len() % 2 == 1 {
        values[k]
    } else {
        0.5 * (values[k - 1] + values[k])
    }
}
