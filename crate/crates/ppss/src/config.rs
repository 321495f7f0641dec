//! TOML configuration for user-defined problems. Matrix and vector entries
//! are expression strings over u1..u_d, x, t (see `expr`).
//!
//! ```toml
//! [problem]
//! dimension = 2
//! domain = [-1.0, 1.0]
//! constant_coefficients = false
//! A = [["2", "1"], ["0", "2"]]
//! B = [["1", "0"], ["0", "1"]]
//! G = ["u1*u2", "u1^2"]          # optional; Jacobian by finite differences
//! # dG = [["u2", "u1"], ["2*u1", "0"]]   # optional analytic Jacobian
//! gamma = ["0", "0"]
//! g_left = ["0", "0"]
//! g_right = ["0", "0"]
//! u0 = ["sin(x)", "0"]
//! ```

use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::error::{PpssError, Result};
use crate::expr::{parse, Expr};
use crate::problems::Problem;
use crate::system::{MatFn, SystemDef};

#[derive(Debug, Deserialize)]
struct ConfigFile {
    problem: ProblemConfig,
}

#[derive(Debug, Deserialize)]
struct ProblemConfig {
    dimension: usize,
    domain: [f64; 2],
    #[serde(default)]
    constant_coefficients: bool,
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    #[serde(rename = "B")]
    b: Vec<Vec<String>>,
    #[serde(rename = "G")]
    g: Option<Vec<String>>,
    #[serde(rename = "dG")]
    dg: Option<Vec<Vec<String>>>,
    gamma: Vec<String>,
    g_left: Vec<String>,
    g_right: Vec<String>,
    u0: Vec<String>,
}

fn parse_matrix(entries: &[Vec<String>], d: usize, what: &str) -> Result<Vec<Expr>> {
    if entries.len() != d || entries.iter().any(|r| r.len() != d) {
        return Err(PpssError::InvalidConfig(format!("{what} must be a {d}x{d} matrix")));
    }
    entries.iter().flatten().map(|s| parse(s, d)).collect()
}

fn parse_vector(entries: &[String], d: usize, what: &str) -> Result<Vec<Expr>> {
    if entries.len() != d {
        return Err(PpssError::InvalidConfig(format!("{what} must have {d} entries")));
    }
    entries.iter().map(|s| parse(s, d)).collect()
}

fn mat_fn(exprs: Vec<Expr>, d: usize) -> MatFn {
    Arc::new(move |u: &DVector<f64>| {
        DMatrix::from_fn(d, d, |i, j| exprs[i * d + j].eval(u, 0.0, 0.0))
    })
}

/// Central finite-difference Jacobian of the flux expressions.
fn fd_jacobian(g: Vec<Expr>, d: usize) -> MatFn {
    Arc::new(move |u: &DVector<f64>| {
        DMatrix::from_fn(d, d, |i, j| {
            let h = 1e-6 * (1.0 + u[j].abs());
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += h;
            dn[j] -= h;
            (g[i].eval(&up, 0.0, 0.0) - g[i].eval(&dn, 0.0, 0.0)) / (2.0 * h)
        })
    })
}

/// Load a user-defined problem (no exact solution attached).
pub fn load_problem(path: &Path) -> Result<Problem> {
    let text = std::fs::read_to_string(path)?;
    let file: ConfigFile =
        toml::from_str(&text).map_err(|e| PpssError::InvalidConfig(e.to_string()))?;
    let pc = file.problem;
    let d = pc.dimension;
    if d < 1 {
        return Err(PpssError::InvalidConfig("dimension must be at least 1".into()));
    }
    if pc.domain[0] >= pc.domain[1] {
        return Err(PpssError::InvalidConfig("domain must satisfy xL < xR".into()));
    }

    let a = mat_fn(parse_matrix(&pc.a, d, "A")?, d);
    let b = mat_fn(parse_matrix(&pc.b, d, "B")?, d);
    let dg: MatFn = match (&pc.dg, &pc.g) {
        (Some(dg), _) => mat_fn(parse_matrix(dg, d, "dG")?, d),
        (None, Some(g)) => fd_jacobian(parse_vector(g, d, "G")?, d),
        (None, None) => {
            let zero = DMatrix::zeros(d, d);
            Arc::new(move |_| zero.clone())
        }
    };
    let gamma_exprs = parse_vector(&pc.gamma, d, "gamma")?;
    let gl = parse_vector(&pc.g_left, d, "g_left")?;
    let gr = parse_vector(&pc.g_right, d, "g_right")?;
    let u0 = parse_vector(&pc.u0, d, "u0")?;

    let zero_state = DVector::zeros(d);
    let zs1 = zero_state.clone();
    let zs2 = zero_state.clone();
    let sys = SystemDef {
        dim: d,
        domain: (pc.domain[0], pc.domain[1]),
        a,
        b,
        dg,
        gamma: Arc::new(move |u, x, t| {
            DVector::from_iterator(d, gamma_exprs.iter().map(|e| e.eval(u, x, t)))
        }),
        g_left: Arc::new(move |t| DVector::from_iterator(d, gl.iter().map(|e| e.eval(&zs1, 0.0, t)))),
        g_right: Arc::new(move |t| {
            DVector::from_iterator(d, gr.iter().map(|e| e.eval(&zs2, 0.0, t)))
        }),
        u0: Arc::new(move |x| DVector::from_iterator(d, u0.iter().map(|e| e.eval(&zero_state, x, 0.0)))),
        constant_coefficients: pc.constant_coefficients,
    };
    Ok(Problem { name: "user", sys, exact: None })
}
