//! Built-in benchmark problems: two manufactured smooth cases, a linear
//! problem with a separable series reference solution and nonsmooth initial
//! data, and two Riemann experiments.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{PpssError, Result};
use crate::system::{manufacture_source, ExactSolution, SystemDef};

/// Registered problem: the system together with its exact or reference
/// solution when one is available.
#[derive(Clone)]
pub struct Problem {
    pub name: &'static str,
    pub sys: SystemDef,
    pub exact: Option<Arc<dyn Fn(f64, f64) -> DVector<f64> + Send + Sync>>,
}

pub const PROBLEM_NAMES: [&str; 6] =
    ["p1a", "p1b", "p2-square", "p2-hat", "riemann-quad", "riemann-fractional"];

/// Look up a built-in problem by name.
pub fn registry(name: &str) -> Result<Problem> {
    match name {
        "p1a" => Ok(problem_1a()),
        "p1b" => Ok(problem_1b()),
        "p2-square" => Ok(problem_2(PulseKind::Square)),
        "p2-hat" => Ok(problem_2(PulseKind::Hat)),
        "riemann-quad" => Ok(riemann(RiemannFlux::Quadratic).0),
        "riemann-fractional" => Ok(riemann(RiemannFlux::Fractional).0),
        other => Err(PpssError::UnknownProblem(other.to_string())),
    }
}

/// Jacobian of the quadratic flux G(u, v) = (uv, u^2).
pub fn quadratic_flux_jacobian(u: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[u[1], u[0], 2.0 * u[0], 0.0])
}

/// Exact smooth solution shared by the two manufactured problems:
/// u1 = x + e^{-t} sin x, u2 = (1 + t) sin x, with its analytic derivatives.
pub fn smooth_exact() -> ExactSolution {
    let vec2 = |a: f64, b: f64| DVector::from_column_slice(&[a, b]);
    ExactSolution {
        u: Arc::new(move |x, t| vec2(x + (-t).exp() * x.sin(), (1.0 + t) * x.sin())),
        u_t: Arc::new(move |x, t| vec2(-(-t).exp() * x.sin(), x.sin())),
        u_x: Arc::new(move |x, t| vec2(1.0 + (-t).exp() * x.cos(), (1.0 + t) * x.cos())),
        u_xx: Arc::new(move |x, t| vec2(-(-t).exp() * x.sin(), -(1.0 + t) * x.sin())),
        u_xt: Arc::new(move |x, t| vec2(-(-t).exp() * x.cos(), x.cos())),
        u_xxt: Arc::new(move |x, t| vec2((-t).exp() * x.sin(), -x.sin())),
    }
}

fn smooth_boundary_and_init() -> (SystemDef, ExactSolution) {
    let exact = smooth_exact();
    let eu = exact.u.clone();
    let eu2 = exact.u.clone();
    let eu3 = exact.u.clone();
    let pi = std::f64::consts::PI;
    let sys = SystemDef {
        dim: 2,
        domain: (-pi, pi),
        a: Arc::new(|_| DMatrix::identity(2, 2)),
        b: Arc::new(|_| DMatrix::identity(2, 2)),
        dg: Arc::new(|u: &DVector<f64>| quadratic_flux_jacobian(u)),
        gamma: Arc::new(|_, _, _| DVector::zeros(2)),
        g_left: Arc::new(move |t| eu(-pi, t)),
        g_right: Arc::new(move |t| eu2(pi, t)),
        u0: Arc::new(move |x| eu3(x, 0.0)),
        constant_coefficients: false,
    };
    (sys, exact)
}

/// Manufactured problem with constant coefficients
/// A = [[2, 1], [0, 2]], B = I, G = (uv, u^2).
pub fn problem_1a() -> Problem {
    let (mut sys, exact) = smooth_boundary_and_init();
    let a: crate::system::MatFn = Arc::new(|_| DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]));
    let b: crate::system::MatFn = Arc::new(|_| DMatrix::identity(2, 2));
    sys.a = a.clone();
    sys.b = b.clone();
    sys.constant_coefficients = true;
    let zero_dir: crate::system::DirMatFn = Arc::new(|_, _| DMatrix::zeros(2, 2));
    sys.gamma =
        manufacture_source(a, zero_dir.clone(), b, zero_dir, sys.dg.clone(), exact.clone());
    Problem { name: "p1a", sys, exact: Some(exact.u) }
}

/// Manufactured problem with state-dependent coefficients
/// A = diag(4 + u, 4 + v), B = [[u, v], [v, 0]], G = (uv, u^2).
pub fn problem_1b() -> Problem {
    let (mut sys, exact) = smooth_boundary_and_init();
    let a: crate::system::MatFn = Arc::new(|u: &DVector<f64>| {
        DMatrix::from_row_slice(2, 2, &[4.0 + u[0], 0.0, 0.0, 4.0 + u[1]])
    });
    let b: crate::system::MatFn =
        Arc::new(|u: &DVector<f64>| DMatrix::from_row_slice(2, 2, &[u[0], u[1], u[1], 0.0]));
    sys.a = a.clone();
    sys.b = b.clone();
    sys.constant_coefficients = false;
    let da_dir: crate::system::DirMatFn =
        Arc::new(|_, w: &DVector<f64>| DMatrix::from_row_slice(2, 2, &[w[0], 0.0, 0.0, w[1]]));
    let db_dir: crate::system::DirMatFn =
        Arc::new(|_, w: &DVector<f64>| DMatrix::from_row_slice(2, 2, &[w[0], w[1], w[1], 0.0]));
    sys.gamma = manufacture_source(a, da_dir, b, db_dir, sys.dg.clone(), exact.clone());
    Problem { name: "p1b", sys, exact: Some(exact.u) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseKind {
    Square,
    Hat,
}

/// Default truncation of the series reference solution.
pub const SERIES_M: usize = 2000;

/// Separable reference solution of the linear system (A = [[2, 1], [0, 2]],
/// B = I, G = gamma = 0, zero Dirichlet data on [-1, 1]):
///
/// ```text
/// u1 = sum e^{t a_n} (C1_n + t b_n C2_n) X_n,  u2 = sum e^{t a_n} C2_n X_n,
/// X_n = sin(n pi (x + 1)/2).
/// ```
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    pub m: usize,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
}

/// lambda_n = -(n pi / 2)^2.
pub fn mode_lambda(n: usize) -> f64 {
    let h = n as f64 * std::f64::consts::PI / 2.0;
    -h * h
}

/// alpha_n = -lambda_n / (1 - 2 lambda_n); increasing in n with limit 1/2.
pub fn mode_alpha(n: usize) -> f64 {
    let l = mode_lambda(n);
    -l / (1.0 - 2.0 * l)
}

/// beta_n = -alpha_n^2.
pub fn mode_beta(n: usize) -> f64 {
    let a = mode_alpha(n);
    -a * a
}

impl SeriesSolution {
    pub fn new(c1: Vec<f64>, c2: Vec<f64>) -> Self {
        assert_eq!(c1.len(), c2.len());
        SeriesSolution { m: c1.len(), c1, c2 }
    }

    pub fn eval(&self, x: f64, t: f64) -> (f64, f64) {
        let mut u1 = 0.0;
        let mut u2 = 0.0;
        for n in 1..=self.m {
            let xn = (n as f64 * std::f64::consts::PI / 2.0 * (x + 1.0)).sin();
            let e = (t * mode_alpha(n)).exp();
            u1 += e * (self.c1[n - 1] + t * mode_beta(n) * self.c2[n - 1]) * xn;
            u2 += e * self.c2[n - 1] * xn;
        }
        (u1, u2)
    }
}

/// Sine-series coefficients U_n = int_{-1}^{1} U(x) X_n(x) dx of the pulse
/// initial data, by closed form. The X_n are orthonormal on (-1, 1).
pub fn pulse_coefficients(kind: PulseKind, m: usize) -> Vec<f64> {
    (1..=m)
        .map(|n| {
            let npi = n as f64 * std::f64::consts::PI;
            match kind {
                PulseKind::Square => {
                    2.0 / npi * ((npi / 4.0).cos() - (3.0 * npi / 4.0).cos())
                }
                PulseKind::Hat => {
                    let c = npi / 2.0;
                    2.0 * c.sin() * (1.0 - c.cos()) / (c * c)
                }
            }
        })
        .collect()
}

/// Reference series for the square pulse (both components) or the hat
/// (first component only).
pub fn pulse_series(kind: PulseKind, m: usize) -> SeriesSolution {
    let c = pulse_coefficients(kind, m);
    match kind {
        PulseKind::Square => SeriesSolution::new(c.clone(), c),
        PulseKind::Hat => SeriesSolution::new(c.clone(), vec![0.0; c.len()]),
    }
}

/// Pointwise pulse data: the unit square on |x| <= 1/2 (both components) or
/// the hat 1 - |x| (first component only).
pub fn pulse_profile(kind: PulseKind, x: f64) -> DVector<f64> {
    match kind {
        PulseKind::Square => {
            let v = if x.abs() <= 0.5 { 1.0 } else { 0.0 };
            DVector::from_column_slice(&[v, v])
        }
        PulseKind::Hat => DVector::from_column_slice(&[1.0 - x.abs(), 0.0]),
    }
}

fn problem_2(kind: PulseKind) -> Problem {
    let series = Arc::new(pulse_series(kind, SERIES_M));
    // Initial data is the truncated reference series at t = 0 rather than the
    // raw pulse of `pulse_profile`: the discrete run and the reference target
    // must solve the same initial-value problem, otherwise the unresolvable
    // nodal content of the jump dominates the reported errors and spatial
    // convergence stalls. The two initializations agree away from the kinks
    // up to the series tail.
    let s0 = series.clone();
    let u0: crate::system::ProfileFn = Arc::new(move |x| {
        let (u1, u2) = s0.eval(x, 0.0);
        DVector::from_column_slice(&[u1, u2])
    });
    let sys = SystemDef {
        dim: 2,
        domain: (-1.0, 1.0),
        a: Arc::new(|_| DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0])),
        b: Arc::new(|_| DMatrix::identity(2, 2)),
        dg: Arc::new(|_| DMatrix::zeros(2, 2)),
        gamma: Arc::new(|_, _, _| DVector::zeros(2)),
        g_left: Arc::new(|_| DVector::zeros(2)),
        g_right: Arc::new(|_| DVector::zeros(2)),
        u0,
        constant_coefficients: true,
    };
    let exact: Arc<dyn Fn(f64, f64) -> DVector<f64> + Send + Sync> = Arc::new(move |x, t| {
        let (u1, u2) = series.eval(x, t);
        DVector::from_column_slice(&[u1, u2])
    });
    let name = if kind == PulseKind::Square { "p2-square" } else { "p2-hat" };
    Problem { name, sys, exact: Some(exact) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiemannFlux {
    Quadratic,
    Fractional,
}

pub const FRACTIONAL_ALPHA: f64 = 0.1;

/// Denominator of the fractional flux:
/// lambda(u, v) = alpha v + (1 - alpha) v^2 + u^2 + (1 - u - v)^2.
pub fn fractional_lambda(u: f64, v: f64) -> f64 {
    let a = FRACTIONAL_ALPHA;
    a * v + (1.0 - a) * v * v + u * u + (1.0 - u - v) * (1.0 - u - v)
}

const LAMBDA_GUARD: f64 = 1e-14;

/// Fractional flux G = (u^2, v^2) / lambda(u, v), zero when the denominator
/// vanishes.
pub fn fractional_flux(u: f64, v: f64) -> (f64, f64) {
    let l = fractional_lambda(u, v);
    if l.abs() < LAMBDA_GUARD {
        return (0.0, 0.0);
    }
    (u * u / l, v * v / l)
}

/// Analytic Jacobian of the fractional flux by the quotient rule; returns the
/// zero matrix (and counts a warning) when the denominator vanishes.
pub fn fractional_flux_jacobian(u: f64, v: f64, warnings: &AtomicU64) -> DMatrix<f64> {
    let a = FRACTIONAL_ALPHA;
    let l = fractional_lambda(u, v);
    if l.abs() < LAMBDA_GUARD {
        warnings.fetch_add(1, Ordering::Relaxed);
        return DMatrix::zeros(2, 2);
    }
    let lu = 2.0 * u - 2.0 * (1.0 - u - v);
    let lv = a + 2.0 * (1.0 - a) * v - 2.0 * (1.0 - u - v);
    let l2 = l * l;
    DMatrix::from_row_slice(
        2,
        2,
        &[
            (2.0 * u * l - u * u * lu) / l2,
            -u * u * lv / l2,
            -v * v * lu / l2,
            (2.0 * v * l - v * v * lv) / l2,
        ],
    )
}

/// Riemann experiment on (-56, 200): A = diag(1/(1+u^2), 1/(1+v^2)), B = 0,
/// gamma = 0, zero Dirichlet data, jump data (0.1, 0.9) for x <= 0 and
/// (0, 0) otherwise. Returns the system and the shared division-guard
/// warning counter.
pub fn riemann(flux: RiemannFlux) -> (Problem, Arc<AtomicU64>) {
    let warnings = Arc::new(AtomicU64::new(0));
    let w = warnings.clone();
    let dg: crate::system::MatFn = match flux {
        RiemannFlux::Quadratic => Arc::new(|u: &DVector<f64>| quadratic_flux_jacobian(u)),
        RiemannFlux::Fractional => {
            Arc::new(move |u: &DVector<f64>| fractional_flux_jacobian(u[0], u[1], &w))
        }
    };
    let sys = SystemDef {
        dim: 2,
        domain: (-56.0, 200.0),
        a: Arc::new(|u: &DVector<f64>| {
            DMatrix::from_row_slice(
                2,
                2,
                &[1.0 / (1.0 + u[0] * u[0]), 0.0, 0.0, 1.0 / (1.0 + u[1] * u[1])],
            )
        }),
        b: Arc::new(|_| DMatrix::zeros(2, 2)),
        dg,
        gamma: Arc::new(|_, _, _| DVector::zeros(2)),
        g_left: Arc::new(|_| DVector::zeros(2)),
        g_right: Arc::new(|_| DVector::zeros(2)),
        u0: Arc::new(|x| {
            if x <= 0.0 {
                DVector::from_column_slice(&[0.1, 0.9])
            } else {
                DVector::zeros(2)
            }
        }),
        constant_coefficients: false,
    };
    let name = if flux == RiemannFlux::Quadratic { "riemann-quad" } else { "riemann-fractional" };
    (Problem { name, sys, exact: None }, warnings)
}
