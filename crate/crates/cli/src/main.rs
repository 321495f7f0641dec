//! Command-line driver for the spectral pseudo-parabolic system solver.
//!
//! Subcommands:
//! - `solve`: one run of a registered (or TOML-defined) problem; writes the
//!   final nodal profile, an error report when an exact solution exists, and
//!   snapshot profiles for the Riemann experiments.
//! - `table`: a convergence table over lists of N and dt; writes CSV.
//! - `tw`: traveling-wave analysis of the cubic-flux model in its three
//!   regimes.
//!
//! Exit codes: 0 success, 2 solver failure, 3 configuration error. Worker
//! count is controlled only by the `RAYON_NUM_THREADS` environment variable.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ppss::driver::{
    run_convergence, run_riemann, scheme_from_id, solve_problem, write_plot_script,
    write_profile_csv, ConvergenceTable,
};
use ppss::error::PpssError;
use ppss::norms::NormKind;
use ppss::problems::{registry, Problem, PROBLEM_NAMES};
use ppss::sdirk::SdirkScheme;
use ppss::waves::{
    classify_dispersive, expand_diffusive, explicit_profile, shock_speed, shoot_connection,
    Regime, TravelingWaveProblem,
};

#[derive(Parser)]
#[command(name = "ppss", version, about = "Spectral solver for pseudo-parabolic PDE systems")]
struct Cli {
    /// TOML file defining a custom problem (used instead of --problem).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem at fixed resolution.
    Solve(SolveArgs),
    /// Run a convergence table over lists of N and dt.
    Table(TableArgs),
    /// Traveling-wave analysis of the cubic-flux model.
    Tw(TwArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Registered problem id.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long = "N")]
    n: usize,
    #[arg(long)]
    dt: f64,
    #[arg(long, default_value = "ssp22")]
    scheme: String,
    #[arg(long = "T", default_value_t = 1.0)]
    t_final: f64,
    /// Snapshot times for the Riemann experiments (defaults to T/2 and T).
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = NormArg::Nodal)]
    norm: NormArg,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    problem: Option<String>,
    /// Comma-separated list; a singleton broadcasts against the dt list.
    #[arg(long = "N", value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    dt: Vec<f64>,
    #[arg(long, default_value = "ssp22")]
    scheme: String,
    #[arg(long = "T", default_value_t = 1.0)]
    t_final: f64,
    #[arg(long)]
    out: PathBuf,
    /// Discrete norm convention. `flat` is the convention of the reference
    /// error tables; `nodal` uses the quadrature weights; `dense` integrates
    /// the modal reconstruction.
    #[arg(long, value_enum, default_value_t = NormArg::Flat)]
    norm: NormArg,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct TwArgs {
    #[arg(long, value_enum)]
    regime: RegimeArg,
    /// Left state u-.
    #[arg(long)]
    ul: f64,
    /// Right state u+.
    #[arg(long)]
    ur: f64,
    /// Drift coefficient for the balanced regime; computed from the states
    /// when omitted.
    #[arg(long)]
    alpha: Option<f64>,
    /// Highest expansion order kept in the diffusive regime.
    #[arg(long, default_value_t = 2)]
    orders: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Nodal,
    Flat,
    Dense,
}

impl From<NormArg> for NormKind {
    fn from(v: NormArg) -> NormKind {
        match v {
            NormArg::Nodal => NormKind::Nodal,
            NormArg::Flat => NormKind::FlatNodal,
            NormArg::Dense => NormKind::Dense,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Balanced,
    Diffusive,
    Dispersive,
}

/// Error carrying its process exit code: 2 for solver failures, 3 for
/// configuration problems.
struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn solver(msg: impl Into<String>) -> CliError {
        CliError { code: 2, msg: msg.into() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> CliError {
        CliError::solver(err.to_string())
    }
}

impl From<PpssError> for CliError {
    fn from(err: PpssError) -> CliError {
        let code = match err {
            PpssError::UnknownProblem(_)
            | PpssError::InvalidConfig(_)
            | PpssError::Expr(_)
            | PpssError::ListLengthMismatch(_, _)
            | PpssError::InvalidWaveStates(_)
            | PpssError::DegreeTooSmall(_)
            | PpssError::PointOutOfDomain(_)
            | PpssError::DimensionMismatch { .. } => 3,
            _ => 2,
        };
        CliError { code, msg: err.to_string() }
    }
}

fn load(problem: &Option<String>, config: &Option<PathBuf>) -> Result<Problem, PpssError> {
    match (config, problem) {
        (Some(path), _) => ppss::config::load_problem(path),
        (None, Some(id)) => registry(id),
        (None, None) => Err(PpssError::InvalidConfig(format!(
            "no problem selected: pass --problem (one of {}) or --config",
            PROBLEM_NAMES.join(", ")
        ))),
    }
}

fn ensure_out(dir: &Path) -> Result<(), PpssError> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn run_solve(args: &SolveArgs, config: &Option<PathBuf>) -> Result<(), CliError> {
    let problem = load(&args.problem, config)?;
    let scheme = scheme_from_id(&args.scheme)?;
    ensure_out(&args.out)?;

    if problem.name.starts_with("riemann") {
        return run_solve_riemann(args, &problem, scheme);
    }

    let outcome =
        solve_problem(&problem, args.n, args.dt, scheme, args.t_final, args.norm.into())?;
    let grid = ppss::legendre::build_grid(args.n)?;
    let (xl, xr) = problem.sys.domain;
    let x: Vec<f64> =
        grid.nodes.iter().map(|&xi| xl + (xr - xl) * (xi + 1.0) / 2.0).collect();
    write_profile_csv(&args.out.join("solution.csv"), &x, &outcome.solution)?;
    write_plot_script(&args.out.join("plot.gp"), &["solution.csv".into()])?;

    match outcome.norms {
        Some(e) => println!(
            "{} N={} dt={} T={}: L2 {:.4e}  H1 {:.4e}  Linf {:.4e}  ({:.2}s, {} sweeps)",
            problem.name, args.n, args.dt, args.t_final, e.l2, e.h1, e.linf,
            outcome.runtime_s, outcome.fp_iters
        ),
        None => println!(
            "{} N={} dt={} T={}: solved ({:.2}s, {} sweeps); no exact solution registered",
            problem.name, args.n, args.dt, args.t_final, outcome.runtime_s, outcome.fp_iters
        ),
    }
    Ok(())
}

fn run_solve_riemann(args: &SolveArgs, problem: &Problem, scheme: SdirkScheme) -> Result<(), CliError> {
    let times = args
        .snapshots
        .clone()
        .unwrap_or_else(|| vec![args.t_final / 2.0, args.t_final]);
    let outcome = run_riemann(problem, args.n, args.dt, scheme, args.t_final, &times)?;
    let mut names = Vec::new();
    for (t, profile) in &outcome.snapshots {
        let name = format!("profile_t{t:.3}.csv");
        write_profile_csv(&args.out.join(&name), &outcome.x_nodes, profile)?;
        names.push(name);
    }
    write_plot_script(&args.out.join("plot.gp"), &names)?;
    println!(
        "{} N={} dt={} T={}: {} snapshot(s), max |u| {:.4} (initial {:.4})",
        problem.name, args.n, args.dt, args.t_final,
        outcome.snapshots.len(), outcome.run_max, outcome.initial_max
    );
    if outcome.aborted {
        return Err(CliError::solver(format!(
            "run aborted on a non-finite state; last healthy snapshot at t = {}",
            outcome.snapshots.last().map_or(0.0, |s| s.0)
        )));
    }
    Ok(())
}

fn run_table(args: &TableArgs, config: &Option<PathBuf>) -> Result<(), CliError> {
    let problem = load(&args.problem, config)?;
    let scheme = scheme_from_id(&args.scheme)?;
    ensure_out(&args.out)?;
    let table: ConvergenceTable = run_convergence(
        &problem,
        &args.n,
        &args.dt,
        scheme,
        args.t_final,
        args.norm.into(),
    )?;
    let csv = table.to_csv();
    std::fs::write(args.out.join("table.csv"), &csv)?;
    print!("{csv}");
    // Any failed row makes the invocation a solver failure after the healthy
    // rows are written.
    if let Some(row) = table.rows.iter().find(|r| r.result.is_err()) {
        return Err(CliError::solver(format!(
            "row N={} dt={} failed: {}",
            row.n,
            row.dt,
            row.result.as_ref().unwrap_err()
        )));
    }
    Ok(())
}

fn run_tw(args: &TwArgs) -> Result<(), CliError> {
    ensure_out(&args.out)?;
    match args.regime {
        RegimeArg::Balanced => {
            let lambda = shock_speed(args.ul, args.ur);
            let alpha = args
                .alpha
                .unwrap_or_else(|| 3.0 * (args.ul + args.ur) / 2.0 * (2.0 * lambda).sqrt());
            let problem = TravelingWaveProblem {
                u_minus: args.ul,
                u_plus: args.ur,
                regime: Regime::Balanced,
                alpha,
                eps_small: 0.0,
            };
            let traj = shoot_connection(&problem)?;
            let mid = (args.ul + args.ur) / 2.0;
            let y0 = traj.crossing(mid).unwrap_or(0.0);
            let mut out = String::from("y,u_shooting,v,u_closed_form\n");
            for i in (0..traj.y.len()).step_by(50) {
                let closed = explicit_profile(args.ul, alpha, lambda, traj.y[i] - y0)
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                out.push_str(&format!("{},{},{},{}\n", traj.y[i] - y0, traj.u[i], traj.v[i], closed));
            }
            std::fs::write(args.out.join("profile.csv"), out)?;
            println!(
                "balanced wave: lambda={lambda} alpha={alpha}; profile.csv written ({} samples)",
                traj.y.len().div_ceil(50)
            );
        }
        RegimeArg::Diffusive => {
            let exp = expand_diffusive(args.ul, args.ur, args.orders)?;
            let mut out = String::from("eta,u0,u1,u2\n");
            for i in (0..exp.eta.len()).step_by(100) {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    exp.eta[i], exp.u0[i], exp.u1[i], exp.u2[i]
                ));
            }
            std::fs::write(args.out.join("expansion.csv"), out)?;
            println!(
                "diffusive expansion to order {} written (lambda={})",
                args.orders,
                shock_speed(args.ul, args.ur)
            );
        }
        RegimeArg::Dispersive => {
            let report = classify_dispersive(args.ul, args.ur);
            let mut out = String::from("state,type\n");
            for (u, ty) in report.states.iter().zip(report.types.iter()) {
                out.push_str(&format!("{u},{ty:?}\n"));
            }
            out.push_str(&format!(
                "# lambda = {}; traveling wave exists: {}\n",
                report.lambda, !report.nonexistence
            ));
            std::fs::write(args.out.join("dispersive.csv"), &out)?;
            println!(
                "dispersive classification: lambda={}, nonexistence certified: {}",
                report.lambda, report.nonexistence
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // Argument-parsing problems are configuration errors (exit 3); help and
    // version requests succeed.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let ok = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(3) };
        }
    };
    let result = match &cli.command {
        Command::Solve(args) => run_solve(args, &cli.config),
        Command::Table(args) => run_table(args, &cli.config),
        Command::Tw(args) => run_tw(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
