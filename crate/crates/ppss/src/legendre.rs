//! Legendre polynomials, Gauss and Gauss-Lobatto quadrature, and nodal
//! differentiation matrices on the reference interval [-1, 1].

use crate::error::{PpssError, Result};
use nalgebra::{DMatrix, DVector};

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITERS: usize = 100;

/// Legendre polynomial value and first derivative at `x`, by the three-term
/// recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    // Derivative from the pair (P_{n-1}, P_n): (1-x^2) P_n' = n (P_{n-1} - x P_n).
    let dp = if (1.0 - x * x).abs() > 1e-30 {
        (n as f64) * (p_prev - x * p) / (1.0 - x * x)
    } else {
        // Endpoint limit: P_n'(+-1) = (+-1)^{n-1} n (n+1) / 2.
        let sign = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        sign * (n as f64) * (n as f64 + 1.0) / 2.0
    };
    (p, dp)
}

/// Evaluate the Legendre polynomial of degree `k` at `x` in [-1, 1].
pub fn legendre_eval(k: usize, x: f64) -> Result<f64> {
    if x.abs() > 1.0 + 1e-12 {
        return Err(PpssError::PointOutOfDomain(x));
    }
    Ok(legendre_pair(k, x.clamp(-1.0, 1.0)).0)
}

/// Derivative of the Legendre polynomial of degree `k` at `x` in [-1, 1].
pub fn legendre_deriv(k: usize, x: f64) -> Result<f64> {
    if x.abs() > 1.0 + 1e-12 {
        return Err(PpssError::PointOutOfDomain(x));
    }
    Ok(legendre_pair(k, x.clamp(-1.0, 1.0)).1)
}

/// A Gauss-Lobatto-Legendre collocation grid with its differentiation
/// matrices.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    /// Polynomial degree N; the grid carries N + 1 nodes.
    pub n: usize,
    /// Nodes in ascending order, nodes[0] = -1, nodes[N] = +1.
    pub nodes: DVector<f64>,
    /// Quadrature weights, exact through degree 2N - 1.
    pub weights: DVector<f64>,
    /// First-derivative collocation matrix.
    pub d1: DMatrix<f64>,
    /// Second-derivative collocation matrix, d1 * d1.
    pub d2: DMatrix<f64>,
}

/// Build the degree-`n` Gauss-Lobatto-Legendre grid.
///
/// Interior nodes are the roots of (1 - x^2) P_n'(x), found by Newton
/// iteration seeded with Chebyshev points; weights are
/// w_j = 2 / (n (n + 1) P_n(x_j)^2).
pub fn build_grid(n: usize) -> Result<SpectralGrid> {
    if n < 1 {
        return Err(PpssError::DegreeTooSmall(n));
    }
    let mut nodes = DVector::zeros(n + 1);
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    for j in 1..n {
        // Chebyshev-Gauss-Lobatto initial guess, ascending in j.
        let mut x = -(std::f64::consts::PI * j as f64 / n as f64).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITERS {
            let (p, dp) = legendre_pair(n, x);
            // Root of P_n'; P_n'' from (1-x^2) P_n'' = 2 x P_n' - n(n+1) P_n.
            let ddp = (2.0 * x * dp - (n as f64) * (n as f64 + 1.0) * p) / (1.0 - x * x);
            let dx = dp / ddp;
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            let (_, dp) = legendre_pair(n, x);
            return Err(PpssError::NodeSolveFailed { node: j, residual: dp.abs() });
        }
        nodes[j] = x;
    }

    let scale = 2.0 / ((n as f64) * (n as f64 + 1.0));
    let mut weights = DVector::zeros(n + 1);
    let mut pn = DVector::zeros(n + 1);
    for j in 0..=n {
        pn[j] = legendre_pair(n, nodes[j]).0;
        weights[j] = scale / (pn[j] * pn[j]);
    }

    let mut d1 = DMatrix::zeros(n + 1, n + 1);
    let nf = (n as f64) * (n as f64 + 1.0);
    for j in 0..=n {
        for k in 0..=n {
            if j != k {
                d1[(j, k)] = (pn[j] / pn[k]) / (nodes[j] - nodes[k]);
            }
        }
    }
    d1[(0, 0)] = -nf / 4.0;
    d1[(n, n)] = nf / 4.0;
    let d2 = &d1 * &d1;

    Ok(SpectralGrid { n, nodes, weights, d1, d2 })
}

impl SpectralGrid {
    /// Derivative of the j-th Lagrange cardinal function at an arbitrary
    /// point `x` in [-1, 1].
    pub fn cardinal_deriv(&self, j: usize, x: f64) -> Result<f64> {
        if x.abs() > 1.0 + 1e-12 {
            return Err(PpssError::PointOutOfDomain(x));
        }
        let x = x.clamp(-1.0, 1.0);
        let xj = self.nodes[j];
        // At (or numerically on top of) a node the closed form is 0/0; fall
        // back to the collocation matrix.
        for (k, &xk) in self.nodes.iter().enumerate() {
            if (x - xk).abs() < 1e-12 {
                return Ok(self.d1[(k, j)]);
            }
        }
        let n = self.n as f64;
        let nn1 = n * (n + 1.0);
        let (p, dp) = legendre_pair(self.n, x);
        let pj = legendre_pair(self.n, xj).0;
        let c = 1.0 / (nn1 * pj);
        let num = -nn1 * p * (xj - x) + (1.0 - x * x) * dp;
        Ok(c * num / ((xj - x) * (xj - x)))
    }

    /// Project nodal values onto Legendre modes using the discrete inner
    /// product of the grid.
    pub fn project_l2(&self, values: &DVector<f64>) -> Result<ModalCoeffs> {
        if values.len() != self.n + 1 {
            return Err(PpssError::DimensionMismatch { expected: self.n + 1, got: values.len() });
        }
        let mut coeffs = DVector::zeros(self.n + 1);
        for k in 0..=self.n {
            let mut s = 0.0;
            for j in 0..=self.n {
                s += self.weights[j] * values[j] * legendre_pair(k, self.nodes[j]).0;
            }
            // Discrete norms: gamma_k = 2/(2k+1) except the top mode,
            // where the Lobatto rule loses exactness and gamma_N = 2/N.
            let gamma = if k < self.n { 2.0 / (2.0 * k as f64 + 1.0) } else { 2.0 / self.n as f64 };
            coeffs[k] = s / gamma;
        }
        Ok(ModalCoeffs { coeffs })
    }
}

/// Legendre modal coefficients of a nodal function.
#[derive(Debug, Clone)]
pub struct ModalCoeffs {
    pub coeffs: DVector<f64>,
}

impl ModalCoeffs {
    /// Evaluate the modal expansion at `x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let mut s = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            s += c * legendre_eval(k, x)?;
        }
        Ok(s)
    }
}

/// The `n`-point Gauss-Legendre rule on [-1, 1], exact through degree 2n - 1.
pub fn gauss_rule(n: usize) -> Result<(DVector<f64>, DVector<f64>)> {
    if n < 1 {
        return Err(PpssError::DegreeTooSmall(n));
    }
    let mut nodes = DVector::zeros(n);
    let mut weights = DVector::zeros(n);
    for j in 0..n {
        // Standard asymptotic initial guess for the j-th root of P_n.
        let mut x = -(std::f64::consts::PI * (j as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITERS {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            let (p, _) = legendre_pair(n, x);
            return Err(PpssError::NodeSolveFailed { node: j, residual: p.abs() });
        }
        let (_, dp) = legendre_pair(n, x);
        nodes[j] = x;
        weights[j] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    Ok((nodes, weights))
}
