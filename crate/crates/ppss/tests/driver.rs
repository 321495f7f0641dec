use nalgebra::{DMatrix, DVector};
use ppss::config::load_problem;
use ppss::driver::{
    half_height_position, observed_order, run_convergence, run_riemann, scheme_from_id,
    scheme_id, solve_problem, write_plot_script, write_profile_csv,
};
use ppss::expr::parse;
use ppss::legendre::build_grid;
use ppss::norms::{error_norms, NormKind};
use ppss::problems::{registry, riemann, RiemannFlux};
use ppss::sdirk::SdirkScheme;

// ---------------------------------------------------------------------------
// Error norms
// ---------------------------------------------------------------------------

fn nodal_field(n: usize, f: impl Fn(f64) -> f64) -> (ppss::legendre::SpectralGrid, DMatrix<f64>) {
    let grid = build_grid(n).unwrap();
    let mut e = DMatrix::zeros(1, n + 1);
    for j in 0..=n {
        e[(0, j)] = f(grid.nodes[j]);
    }
    (grid, e)
}

#[test]
fn norms_of_a_constant_error() {
    let (grid, e) = nodal_field(12, |_| 1.0);
    let r = error_norms(&grid, &e, (-1.0, 1.0), NormKind::Nodal).unwrap();
    // ||1||_{L2(-1,1)} = sqrt(2); the derivative contributes nothing.
    assert!((r.l2 - 2.0_f64.sqrt()).abs() < 1e-12);
    assert!((r.h1 - 2.0_f64.sqrt()).abs() < 1e-9);
    assert_eq!(r.linf, 1.0);
}

#[test]
fn norms_of_a_linear_error() {
    let (grid, e) = nodal_field(10, |x| x);
    let r = error_norms(&grid, &e, (-1.0, 1.0), NormKind::Nodal).unwrap();
    // ||x||^2 = 2/3, |x'|^2 contributes 2.
    assert!((r.l2 - (2.0 / 3.0_f64).sqrt()).abs() < 1e-12);
    assert!((r.h1 - (2.0 / 3.0 + 2.0_f64).sqrt()).abs() < 1e-12);
    assert_eq!(r.linf, 1.0);
}

#[test]
fn norms_scale_with_the_domain() {
    // Same nodal values viewed on (0, 4): measure doubles, chain rule halves
    // the derivative.
    let (grid, e) = nodal_field(10, |x| x);
    let r = error_norms(&grid, &e, (0.0, 4.0), NormKind::Nodal).unwrap();
    assert!((r.l2 - (4.0 / 3.0_f64).sqrt()).abs() < 1e-12);
    assert!((r.h1 - (4.0 / 3.0 + 1.0_f64).sqrt()).abs() < 1e-12);
}

#[test]
fn flat_weighting_matches_its_definition() {
    let n = 9;
    let (grid, e) = nodal_field(n, |x| x * x - 0.3);
    let r = error_norms(&grid, &e, (-1.0, 1.0), NormKind::FlatNodal).unwrap();
    let h = 2.0 / n as f64;
    let l2: f64 = (0..=n).map(|j| h * e[(0, j)] * e[(0, j)]).sum::<f64>().sqrt();
    assert!((r.l2 - l2).abs() < 1e-14);
    // For a constant field the flat weight overcounts the endpoints relative
    // to the exact quadrature: sum of weights is 2 (N+1)/N, not 2.
    let (grid, c) = nodal_field(n, |_| 1.0);
    let r = error_norms(&grid, &c, (-1.0, 1.0), NormKind::FlatNodal).unwrap();
    assert!((r.l2 - (2.0 * (n as f64 + 1.0) / n as f64).sqrt()).abs() < 1e-14);
}

#[test]
fn dense_quadrature_agrees_on_smooth_errors() {
    let (grid, e) = nodal_field(14, |x| (x * 1.3).sin() + 0.2 * x);
    let nodal = error_norms(&grid, &e, (-1.0, 1.0), NormKind::Nodal).unwrap();
    let dense = error_norms(&grid, &e, (-1.0, 1.0), NormKind::Dense).unwrap();
    // The interpolant is resolved at N = 14, so both quadratures integrate
    // essentially the same function.
    assert!((nodal.l2 - dense.l2).abs() < 1e-8, "{} vs {}", nodal.l2, dense.l2);
    assert!((nodal.h1 - dense.h1).abs() < 1e-7);
    assert_eq!(nodal.linf, dense.linf);
}

#[test]
fn multicomponent_norms_sum_over_components() {
    let grid = build_grid(8).unwrap();
    let mut e = DMatrix::zeros(2, 9);
    for j in 0..=8 {
        e[(0, j)] = 1.0;
        e[(1, j)] = 1.0;
    }
    let r = error_norms(&grid, &e, (-1.0, 1.0), NormKind::Nodal).unwrap();
    assert!((r.l2 - 2.0).abs() < 1e-12);
}

// ---------------------------------------------------------------------------
// Driver utilities
// ---------------------------------------------------------------------------

#[test]
fn observed_order_recovers_synthetic_rates() {
    for p in [1.0, 2.0, 3.0] {
        let (hc, hf) = (0.1f64, 0.05f64);
        let c = 7.3;
        let order = observed_order(c * hc.powf(p), c * hf.powf(p), hc, hf);
        assert!((order - p).abs() < 1e-12);
    }
}

#[test]
fn scheme_ids_round_trip() {
    for id in ["ssp22", "ssp23"] {
        assert_eq!(scheme_id(scheme_from_id(id).unwrap()), id);
    }
    assert!(scheme_from_id("rk4").is_err());
}

#[test]
fn convergence_table_broadcasts_and_reports_orders() {
    let p = registry("p1a").unwrap();
    let table = run_convergence(
        &p,
        &[16],
        &[0.1, 0.05],
        SdirkScheme::ssp22(),
        0.5,
        NormKind::Nodal,
    )
    .unwrap();
    assert_eq!(table.rows.len(), 2);
    assert!(table.rows[0].order_l2.is_none());
    let order = table.rows[1].order_l2.unwrap();
    assert!((order - 2.0).abs() < 0.2, "temporal order {order}");

    let csv = table.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "problem,N,dt,scheme,T,err_l2,err_h1,err_linf,order_l2,runtime_s,fp_iters");
    assert_eq!(lines.len(), 3);
    let fields: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(fields[0], "p1a");
    assert_eq!(fields[1], "16");
    assert_eq!(fields[3], "ssp22");
    let err: f64 = fields[5].parse().unwrap();
    let (norms, _, _) = table.rows[1].result.as_ref().unwrap();
    // 16 significant digits in the file; round-trip is exact to one ulp.
    assert!((err - norms.l2).abs() <= 1e-15 * norms.l2);

    // Mismatched list lengths are rejected.
    assert!(run_convergence(&p, &[8, 16], &[0.1, 0.05, 0.025], SdirkScheme::ssp22(), 0.5, NormKind::Nodal).is_err());
}

#[test]
fn solve_is_deterministic() {
    let p = registry("p1b").unwrap();
    let a = solve_problem(&p, 12, 0.05, SdirkScheme::ssp23(), 0.3, NormKind::Nodal).unwrap();
    let b = solve_problem(&p, 12, 0.05, SdirkScheme::ssp23(), 0.3, NormKind::Nodal).unwrap();
    assert_eq!(a.solution, b.solution);
    assert!(a.norms.unwrap().l2 < 1e-3);
}

#[test]
fn half_height_tracks_the_rightmost_crossing() {
    let x = [0.0, 1.0, 2.0, 3.0];
    let mut profile = DMatrix::zeros(1, 4);
    profile[(0, 0)] = 1.0;
    profile[(0, 1)] = 1.0;
    profile[(0, 2)] = 0.4;
    profile[(0, 3)] = 0.0;
    let pos = half_height_position(&x, &profile, 0.5).unwrap();
    assert!((pos - (1.0 + 5.0 / 6.0)).abs() < 1e-12);
    assert!(half_height_position(&x, &profile, 2.0).is_none());
}

#[test]
fn riemann_run_captures_snapshots() {
    let (p, _) = riemann(RiemannFlux::Quadratic);
    let out = run_riemann(&p, 48, 0.25, SdirkScheme::ssp22(), 2.0, &[0.0, 1.0, 2.0]).unwrap();
    assert!(!out.aborted);
    assert_eq!(out.snapshots.len(), 3);
    assert_eq!(out.snapshots[0].0, 0.0);
    assert!((out.snapshots[1].0 - 1.0).abs() < 1e-9);
    assert!((out.snapshots[2].0 - 2.0).abs() < 1e-9);
    assert!((out.initial_max - 0.9).abs() < 1e-12);
    assert!(out.run_max.is_finite() && out.run_max < 9.0);
    assert_eq!(out.x_nodes.len(), 49);
    assert_eq!(out.x_nodes[0], -56.0);
    assert_eq!(out.x_nodes[48], 200.0);
}

#[test]
fn profile_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let x = [0.0, 0.5, 1.0];
    let mut profile = DMatrix::zeros(2, 3);
    profile[(0, 1)] = 2.0;
    profile[(1, 2)] = -1.0;
    let csv_path = dir.path().join("t0.csv");
    write_profile_csv(&csv_path, &x, &profile).unwrap();
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,u1,u2");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("5.0"));

    let gp_path = dir.path().join("plot.gp");
    write_plot_script(&gp_path, &["t0.csv".into(), "t1.csv".into()]).unwrap();
    let script = std::fs::read_to_string(&gp_path).unwrap();
    assert!(script.contains("'t0.csv' using 1:2 with lines"));
    assert!(script.contains("'t1.csv' using 1:3 with lines"));
}

// ---------------------------------------------------------------------------
// Expression language and TOML problems
// ---------------------------------------------------------------------------

fn eval(src: &str, u: &[f64], x: f64, t: f64) -> f64 {
    parse(src, u.len().max(1)).unwrap().eval(&DVector::from_column_slice(u), x, t)
}

#[test]
fn expression_arithmetic() {
    assert_eq!(eval("1+2*3^2", &[], 0.0, 0.0), 19.0);
    assert_eq!(eval("2^3^2", &[], 0.0, 0.0), 512.0); // right associative
    assert_eq!(eval("-x^2", &[], 3.0, 0.0), -9.0);
    assert_eq!(eval("(1+2)*(t-1)", &[], 0.0, 3.0), 6.0);
    assert_eq!(eval("6/4/3", &[], 0.0, 0.0), 0.5);
    assert_eq!(eval("1.5e-2*100", &[], 0.0, 0.0), 1.5);
    assert_eq!(eval("u1*u2 + abs(0-u2)", &[2.0, -3.0], 0.0, 0.0), -3.0);
    let v = eval("sin(x)*exp(0-t) + cos(0) + tanh(1e9)", &[], 0.5, 0.2);
    assert!((v - (0.5_f64.sin() * (-0.2_f64).exp() + 2.0)).abs() < 1e-12);
}

#[test]
fn expression_rejections() {
    assert!(parse("u3", 2).is_err()); // out of range
    assert!(parse("u0", 2).is_err());
    assert!(parse("foo(1)", 2).is_err());
    assert!(parse("1+", 2).is_err());
    assert!(parse("(1", 2).is_err());
    assert!(parse("1 2", 2).is_err()); // trailing input
    assert!(parse("u2", 2).is_ok());
}

fn write_config(dir: &tempfile::TempDir, body: &str) -> std::path::PathBuf {
    let path = dir.path().join("problem.toml");
    std::fs::write(&path, body).unwrap();
    path
}

const GOOD_CONFIG: &str = r#"
[problem]
dimension = 2
domain = [-1.0, 1.0]
constant_coefficients = false
A = [["2", "1"], ["0", "2"]]
B = [["1", "0"], ["0", "1"]]
G = ["u1*u2", "u1^2"]
gamma = ["sin(x)*t", "0"]
g_left = ["t", "0"]
g_right = ["0", "0"]
u0 = ["sin(x)", "x^2"]
"#;

#[test]
fn toml_problem_loads_and_evaluates() {
    let dir = tempfile::tempdir().unwrap();
    let p = load_problem(&write_config(&dir, GOOD_CONFIG)).unwrap();
    assert_eq!(p.sys.dim, 2);
    assert_eq!(p.sys.domain, (-1.0, 1.0));
    assert!(p.exact.is_none());

    let u = DVector::from_column_slice(&[0.3, -0.7]);
    let a = (p.sys.a)(&u);
    assert_eq!(a[(0, 1)], 1.0);
    assert_eq!(a[(1, 0)], 0.0);
    // The flux Jacobian of (u1 u2, u1^2) comes out of finite differences.
    let dg = (p.sys.dg)(&u);
    assert!((dg[(0, 0)] - (-0.7)).abs() < 1e-8);
    assert!((dg[(0, 1)] - 0.3).abs() < 1e-8);
    assert!((dg[(1, 0)] - 0.6).abs() < 1e-8);
    assert!(dg[(1, 1)].abs() < 1e-8);

    let g = (p.sys.gamma)(&u, 0.5, 2.0);
    assert!((g[0] - 0.5_f64.sin() * 2.0).abs() < 1e-14);
    assert_eq!((p.sys.g_left)(3.0)[0], 3.0);
    let u0 = (p.sys.u0)(0.4);
    assert!((u0[1] - 0.16).abs() < 1e-14);
}

#[test]
fn toml_problem_prefers_an_analytic_jacobian() {
    let dir = tempfile::tempdir().unwrap();
    let body = GOOD_CONFIG.replace(
        "G = [\"u1*u2\", \"u1^2\"]",
        "dG = [[\"u2\", \"u1\"], [\"2*u1\", \"0\"]]",
    );
    let p = load_problem(&write_config(&dir, &body)).unwrap();
    let u = DVector::from_column_slice(&[0.3, -0.7]);
    let dg = (p.sys.dg)(&u);
    assert_eq!(dg[(0, 0)], -0.7);
    assert_eq!(dg[(1, 0)], 0.6);
}

#[test]
fn toml_problem_rejections() {
    let dir = tempfile::tempdir().unwrap();
    // Wrong matrix shape.
    let bad = GOOD_CONFIG.replace("A = [[\"2\", \"1\"], [\"0\", \"2\"]]", "A = [[\"2\"], [\"0\"]]");
    assert!(load_problem(&write_config(&dir, &bad)).is_err());
    // Inverted domain.
    let bad = GOOD_CONFIG.replace("domain = [-1.0, 1.0]", "domain = [1.0, -1.0]");
    assert!(load_problem(&write_config(&dir, &bad)).is_err());
    // State index beyond the dimension.
    let bad = GOOD_CONFIG.replace("G = [\"u1*u2\", \"u1^2\"]", "G = [\"u1*u5\", \"u1^2\"]");
    assert!(load_problem(&write_config(&dir, &bad)).is_err());
    // Not TOML at all.
    assert!(load_problem(&write_config(&dir, "not = [toml")).is_err());
    // Missing file.
    assert!(load_problem(&dir.path().join("nope.toml")).is_err());
}
