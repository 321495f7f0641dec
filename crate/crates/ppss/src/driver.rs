//! Batch drivers: single solves, convergence tables, Riemann snapshot runs,
//! and their CSV artifacts.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::assembly::GniOperator;
use crate::error::{PpssError, Result};
use crate::legendre::build_grid;
use crate::norms::{error_norms, ErrorNorms, NormKind};
use crate::problems::Problem;
use crate::sdirk::{integrate, sdirk_step, SdirkScheme, SolverConfig};
use crate::system::homogenize;

pub fn scheme_from_id(id: &str) -> Result<SdirkScheme> {
    match id {
        "ssp22" => Ok(SdirkScheme::ssp22()),
        "ssp23" => Ok(SdirkScheme::ssp23()),
        other => Err(PpssError::InvalidConfig(format!("unknown scheme `{other}`"))),
    }
}

pub fn scheme_id(scheme: SdirkScheme) -> &'static str {
    if scheme.order == 2 {
        "ssp22"
    } else {
        "ssp23"
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// Full nodal solution (lift included), d x (N+1).
    pub solution: DMatrix<f64>,
    pub norms: Option<ErrorNorms>,
    pub runtime_s: f64,
    pub fp_iters: usize,
}

/// Solve one problem at fixed resolution and measure errors against its
/// exact solution when one is registered.
pub fn solve_problem(
    problem: &Problem,
    n: usize,
    dt: f64,
    scheme: SdirkScheme,
    t_final: f64,
    kind: NormKind,
) -> Result<SolveOutcome> {
    let start = std::time::Instant::now();
    let grid = build_grid(n)?;
    let hs = homogenize(problem.sys.clone());
    let mut op = GniOperator::new(hs, grid);
    let v0 = op.initial_state();
    let cfg = SolverConfig::new(dt, t_final);
    let (v, fp_iters) = integrate(scheme, &mut op, &v0, &cfg)?;

    let d = problem.sys.dim;
    let states = op.node_states(&v, t_final);
    let mut solution = DMatrix::zeros(d, op.grid.n + 1);
    for (j, u) in states.iter().enumerate() {
        solution.set_column(j, u);
    }

    let norms = match &problem.exact {
        Some(exact) => {
            let mut err = solution.clone();
            for j in 0..=op.grid.n {
                let x = op.hs.physical_x(op.grid.nodes[j]);
                let ex = exact(x, t_final);
                for p in 0..d {
                    err[(p, j)] -= ex[p];
                }
            }
            Some(error_norms(&op.grid, &err, problem.sys.domain, kind)?)
        }
        None => None,
    };
    Ok(SolveOutcome { solution, norms, runtime_s: start.elapsed().as_secs_f64(), fp_iters })
}

#[derive(Debug, Clone)]
pub struct TableRow {
    pub n: usize,
    pub dt: f64,
    pub result: std::result::Result<(ErrorNorms, f64, usize), String>,
    pub order_l2: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub problem: String,
    pub scheme: SdirkScheme,
    pub t_final: f64,
    pub rows: Vec<TableRow>,
}

/// Pair the resolution lists: equal lengths zip, a singleton broadcasts.
fn pair_lists(n_list: &[usize], dt_list: &[f64]) -> Result<Vec<(usize, f64)>> {
    if n_list.len() == dt_list.len() {
        Ok(n_list.iter().copied().zip(dt_list.iter().copied()).collect())
    } else if n_list.len() == 1 {
        Ok(dt_list.iter().map(|&dt| (n_list[0], dt)).collect())
    } else if dt_list.len() == 1 {
        Ok(n_list.iter().map(|&n| (n, dt_list[0])).collect())
    } else {
        Err(PpssError::ListLengthMismatch(n_list.len(), dt_list.len()))
    }
}

/// Run a grid of (N, dt) solves concurrently; failed rows are kept with the
/// error message and excluded from order extraction.
pub fn run_convergence(
    problem: &Problem,
    n_list: &[usize],
    dt_list: &[f64],
    scheme: SdirkScheme,
    t_final: f64,
    kind: NormKind,
) -> Result<ConvergenceTable> {
    let pairs = pair_lists(n_list, dt_list)?;
    let mut rows: Vec<TableRow> = pairs
        .par_iter()
        .map(|&(n, dt)| {
            let result = solve_problem(problem, n, dt, scheme, t_final, kind)
                .map(|o| {
                    let norms = o.norms.unwrap_or(ErrorNorms { l2: f64::NAN, h1: f64::NAN, linf: f64::NAN });
                    (norms, o.runtime_s, o.fp_iters)
                })
                .map_err(|e| e.to_string());
            TableRow { n, dt, result, order_l2: None }
        })
        .collect();

    // Observed order between consecutive successful rows that differ in
    // exactly one of N and dt.
    for i in 1..rows.len() {
        let (a, b) = (rows[i - 1].clone(), &rows[i]);
        if let (Ok((ea, _, _)), Ok((eb, _, _))) = (&a.result, &b.result) {
            let order = if a.n == b.n && a.dt != b.dt {
                Some((ea.l2 / eb.l2).ln() / (a.dt / b.dt).ln())
            } else if a.dt == b.dt && a.n != b.n {
                Some((ea.l2 / eb.l2).ln() / (b.n as f64 / a.n as f64).ln())
            } else {
                None
            };
            rows[i].order_l2 = order;
        }
    }
    Ok(ConvergenceTable { problem: problem.name.to_string(), scheme, t_final, rows })
}

fn fmt_float(v: f64) -> String {
    format!("{v:.15e}")
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("problem,N,dt,scheme,T,err_l2,err_h1,err_linf,order_l2,runtime_s,fp_iters\n");
        for row in &self.rows {
            match &row.result {
                Ok((e, rt, fp)) => {
                    let order = row.order_l2.map(fmt_float).unwrap_or_default();
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{},{}",
                        self.problem,
                        row.n,
                        fmt_float(row.dt),
                        scheme_id(self.scheme),
                        fmt_float(self.t_final),
                        fmt_float(e.l2),
                        fmt_float(e.h1),
                        fmt_float(e.linf),
                        order,
                        fmt_float(*rt),
                        fp
                    );
                }
                Err(msg) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},failed:{},,,,,",
                        self.problem,
                        row.n,
                        fmt_float(row.dt),
                        scheme_id(self.scheme),
                        fmt_float(self.t_final),
                        msg.replace(',', ";")
                    );
                }
            }
        }
        out
    }
}

/// Observed order from synthetic error data at two resolutions.
pub fn observed_order(err_coarse: f64, err_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (err_coarse / err_fine).ln() / (h_coarse / h_fine).ln()
}

#[derive(Debug, Clone)]
pub struct RiemannOutcome {
    /// (time, d x (N+1) nodal profile) pairs actually captured.
    pub snapshots: Vec<(f64, DMatrix<f64>)>,
    pub x_nodes: Vec<f64>,
    pub initial_max: f64,
    pub run_max: f64,
    /// True when the run hit a non-finite state and stopped early.
    pub aborted: bool,
}

/// March a Riemann experiment, capturing nodal profiles at the requested
/// times. A non-finite state aborts the run but keeps every healthy snapshot.
pub fn run_riemann(
    problem: &Problem,
    n: usize,
    dt: f64,
    scheme: SdirkScheme,
    t_final: f64,
    snapshot_times: &[f64],
) -> Result<RiemannOutcome> {
    let grid = build_grid(n)?;
    let hs = homogenize(problem.sys.clone());
    let mut op = GniOperator::new(hs, grid);
    let d = problem.sys.dim;
    let x_nodes: Vec<f64> = (0..=n).map(|j| op.hs.physical_x(op.grid.nodes[j])).collect();

    let profile = |op: &GniOperator, v: &nalgebra::DVector<f64>, t: f64| -> DMatrix<f64> {
        let states = op.node_states(v, t);
        let mut m = DMatrix::zeros(d, n + 1);
        for (j, u) in states.iter().enumerate() {
            m.set_column(j, u);
        }
        m
    };

    let mut v = op.initial_state();
    let mut t = 0.0;
    let initial = profile(&op, &v, 0.0);
    let initial_max = initial.amax();
    let mut run_max = initial_max;
    let mut wanted: Vec<f64> = snapshot_times.to_vec();
    wanted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut snapshots = Vec::new();
    if wanted.first().is_some_and(|&t0| t0 <= 1e-12) {
        snapshots.push((0.0, initial.clone()));
        wanted.remove(0);
    }
    let mut last_healthy = (0.0, initial);
    let mut aborted = false;

    while t < t_final - 1e-9 {
        let step = dt.min(t_final - t);
        match sdirk_step(scheme, &mut op, &v, t, step, 1e-10, 50) {
            Ok((next, _)) => {
                v = next;
                t += step;
                let p = profile(&op, &v, t);
                run_max = run_max.max(p.amax());
                last_healthy = (t, p.clone());
                while wanted.first().is_some_and(|&tw| t + 1e-9 >= tw) {
                    snapshots.push((t, p.clone()));
                    wanted.remove(0);
                }
            }
            Err(e) => {
                aborted = true;
                snapshots.push(last_healthy.clone());
                eprintln!("riemann run aborted at t = {t}: {e}");
                break;
            }
        }
    }
    Ok(RiemannOutcome { snapshots, x_nodes, initial_max, run_max, aborted })
}

/// Rightmost position where the first component crosses `level`, by linear
/// interpolation between nodes; tracks the advancing front of a
/// right-moving wave.
pub fn half_height_position(x: &[f64], profile: &DMatrix<f64>, level: f64) -> Option<f64> {
    for j in (1..x.len()).rev() {
        let (a, b) = (profile[(0, j - 1)], profile[(0, j)]);
        if (a - level) * (b - level) <= 0.0 && a != b {
            let frac = (level - a) / (b - a);
            return Some(x[j - 1] + frac * (x[j] - x[j - 1]));
        }
    }
    None
}

/// Write (x, u1, u2) columns for one snapshot.
pub fn write_profile_csv(path: &Path, x: &[f64], profile: &DMatrix<f64>) -> Result<()> {
    let mut out = String::from("x,u1,u2\n");
    for (j, &xj) in x.iter().enumerate() {
        let u2 = if profile.nrows() > 1 { profile[(1, j)] } else { 0.0 };
        let _ = writeln!(out, "{},{},{}", fmt_float(xj), fmt_float(profile[(0, j)]), fmt_float(u2));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Emit a gnuplot script that renders every profile CSV in `names`.
pub fn write_plot_script(path: &Path, names: &[String]) -> Result<()> {
    let mut out = String::from("set datafile separator ','\nset key autotitle columnhead\n");
    out.push_str("set xlabel 'x'\nset ylabel 'u'\n");
    out.push_str("plot \\\n");
    let lines: Vec<String> = names
        .iter()
        .map(|f| format!("  '{f}' using 1:2 with lines, '{f}' using 1:3 with lines"))
        .collect();
    out.push_str(&lines.join(", \\\n"));
    out.push('\n');
    std::fs::write(path, out)?;
    Ok(())
}
