use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xpipg::bench::{self, BenchSpec};
use xpipg::io::{format_g17, parse_problem, write_problem, write_values};
use xpipg::oscillating::DEFAULT_SIGMA;
use xpipg::{benchmark_instance, solve, ConicQp64, SolveResult64, SolveStatus, SolverConfig64};

const EXIT_USAGE: u8 = 64;
const EXIT_SOFTWARE: u8 = 70;

#[derive(Parser)]
#[command(
    name = "xpipg",
    version,
    about = "Extrapolated PIPG solver for conic quadratic programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem stored in the conicqp v1 format.
    Solve(SolveArgs),
    /// Solve seeded oscillating-masses instances and write one CSV row per run.
    Bench(BenchArgs),
    /// Write a seeded oscillating-masses instance in the conicqp v1 format.
    Emit(EmitArgs),
}

#[derive(Args)]
struct Tolerances {
    /// Relaxation parameter in (0, 2).
    #[arg(long, default_value_t = 1.6)]
    rho: f64,
    /// Ratio β/α of the step sizes.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1e-4)]
    eps_abs: f64,
    #[arg(long, default_value_t = 1e-4)]
    eps_fea: f64,
    #[arg(long, default_value_t = 1e-4)]
    eps_inf: f64,
    #[arg(long, default_value_t = 200_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 10)]
    check_interval: usize,
}

impl Tolerances {
    fn config(&self) -> SolverConfig64 {
        SolverConfig64 {
            rho: self.rho,
            omega: self.omega,
            eps_abs: self.eps_abs,
            eps_fea: self.eps_fea,
            eps_inf: self.eps_inf,
            max_iters: self.max_iters,
            check_interval: self.check_interval,
            ..SolverConfig64::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[command(flatten)]
    tol: Tolerances,
    /// Write per-check convergence data as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write z then w, one value per line.
    #[arg(long)]
    solution: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Number of masses.
    #[arg(long, default_value_t = 4)]
    l: usize,
    /// Horizon length.
    #[arg(long, default_value_t = 20)]
    tau: usize,
    /// Initial-state means, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    gamma: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
    /// Instances per cell; seeds run from 0 to N−1.
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    /// Relaxation parameters, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1.6")]
    rho: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
    #[arg(long, default_value_t = 1e-4)]
    eps_inf: f64,
    #[arg(long, default_value_t = 200_000)]
    max_iters: usize,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmitArgs {
    #[arg(long, default_value_t = 4)]
    l: usize,
    #[arg(long, default_value_t = 20)]
    tau: usize,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Emit(args) => cmd_emit(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("xpipg: {message}");
            ExitCode::from(code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(path: &Path, err: io::Error) -> Failure {
    Failure {
        code: EXIT_SOFTWARE,
        message: format!("{}: {err}", path.display()),
    }
}

fn exit_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimal => 0,
        SolveStatus::PrimalInfeasible => 2,
        SolveStatus::DualInfeasible => 3,
        SolveStatus::MaxIterations => 4,
        SolveStatus::NumericalFailure => EXIT_SOFTWARE,
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<u8, Failure> {
    let text = fs::read_to_string(&args.file)
        .map_err(|e| usage(format!("{}: {e}", args.file.display())))?;
    let qp = parse_problem(&text).map_err(|e| usage(format!("{}: {e}", args.file.display())))?;
    let mut cfg = args.tol.config();
    cfg.record_trace = args.trace.is_some();
    let result = solve(&qp, &cfg).map_err(|e| usage(format!("{}: {e}", args.file.display())))?;

    print!("{}", summary(&qp, &result));
    if let Some(path) = &args.trace {
        fs::write(path, trace_csv(&result)).map_err(|e| io_failure(path, e))?;
    }
    if let Some(path) = &args.solution {
        let mut text = write_values(&result.z);
        text.push_str(&write_values(&result.w));
        fs::write(path, text).map_err(|e| io_failure(path, e))?;
    }
    Ok(exit_code(result.status))
}

fn summary(qp: &ConicQp64, r: &SolveResult64) -> String {
    let s = &r.stats;
    let certificate_norm = r
        .certificate
        .as_ref()
        .map(|c| c.direction.iter().map(|v| v * v).sum::<f64>().sqrt())
        .unwrap_or(0.0);
    let mut lines = vec![
        ("status", r.status.as_str().to_string()),
        ("iterations", s.iterations.to_string()),
        ("objective", format_g17(qp.objective(&r.z))),
        ("dz", format_g17(s.primal_displacement)),
        ("dw", format_g17(s.dual_displacement)),
        ("residual_constraint", format_g17(s.residuals.constraint)),
        ("residual_upper", format_g17(s.residuals.upper)),
        ("residual_lower", format_g17(s.residuals.lower)),
        ("infeasibility_value", format_g17(s.infeasibility_value)),
        ("certificate_norm", format_g17(certificate_norm)),
        ("alpha", format_g17(s.steps.alpha)),
        ("beta", format_g17(s.steps.beta)),
        ("norm_p", format_g17(s.norm_p)),
        ("norm_h", format_g17(s.norm_h)),
    ];
    if let Some(c) = &r.certificate {
        lines.push(("certificate_valid", c.diagnostics.passed().to_string()));
    }
    if s.diverged {
        lines.push(("diverged", "true".to_string()));
    }
    lines.push(("wall_ms", format!("{:.3}", s.elapsed.as_secs_f64() * 1e3)));
    lines
        .into_iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect()
}

fn trace_csv(r: &SolveResult64) -> String {
    let mut out = String::from("iter,dz,dw,r_eq22_a,r_eq22_b,r_eq22_c,v_eq23\n");
    for row in &r.trace {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.iteration,
            format_g17(row.primal_displacement),
            format_g17(row.dual_displacement),
            format_g17(row.residuals.constraint),
            format_g17(row.residuals.upper),
            format_g17(row.residuals.lower),
            format_g17(row.infeasibility_value),
        ));
    }
    out
}

fn cmd_bench(args: &BenchArgs) -> Result<u8, Failure> {
    if args.seeds == 0 || args.gamma.is_empty() || args.rho.is_empty() {
        return Err(usage("bench needs at least one seed, gamma and rho"));
    }
    let mut spec = BenchSpec::new(
        args.l,
        args.tau,
        args.gamma.clone(),
        args.rho.clone(),
        args.seeds,
    );
    spec.sigma = args.sigma;
    spec.config = SolverConfig64 {
        omega: args.omega,
        eps_inf: args.eps_inf,
        max_iters: args.max_iters,
        ..SolverConfig64::default().with_tolerance(args.eps)
    };
    // reject bad solver flags before spending time on the sweep
    for &rho in &args.rho {
        spec.config
            .clone()
            .with_rho(rho)
            .check()
            .map_err(|e| usage(e.to_string()))?;
    }
    let records = bench::run(&spec).map_err(|e| usage(e.to_string()))?;

    let mut csv = Vec::new();
    bench::write_csv(&mut csv, &records).map_err(|e| Failure {
        code: EXIT_SOFTWARE,
        message: e.to_string(),
    })?;
    let cells = bench::summarize(&records);
    let mut report = String::new();
    for c in &cells {
        let statuses: Vec<String> = c
            .statuses
            .iter()
            .map(|(s, n)| format!("{}:{n}", s.as_str()))
            .collect();
        report.push_str(&format!(
            "gamma={} rho={} runs={} median_iterations={} statuses={}\n",
            c.gamma,
            c.rho,
            c.runs,
            c.median_iterations,
            statuses.join(";"),
        ));
    }
    match &args.out {
        Some(path) => {
            fs::write(path, csv).map_err(|e| io_failure(path, e))?;
            print!("{report}");
        }
        None => {
            io::stdout()
                .write_all(&csv)
                .map_err(|e| io_failure(Path::new("<stdout>"), e))?;
            eprint!("{report}");
        }
    }
    Ok(0)
}

fn cmd_emit(args: &EmitArgs) -> Result<u8, Failure> {
    let qp: ConicQp64 = benchmark_instance(args.l, args.tau, args.gamma, args.sigma, args.seed)
        .map_err(|e| usage(e.to_string()))?;
    let text = write_problem(&qp);
    match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e))?,
        None => print!("{text}"),
    }
    Ok(0)
}
