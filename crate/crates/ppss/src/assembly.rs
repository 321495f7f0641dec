//! Galerkin assembly with numerical integration on the Gauss-Lobatto grid.
//!
//! The semidiscrete problem for the homogenized interior unknown v reads
//!
//! ```text
//! (K0 + s^2 K2(A)) dv/dt = (s^2 K2(B) + s K1(G)) v + H
//! ```
//!
//! where s is the Jacobian of the map to [-1, 1], K0 is the lumped mass
//! matrix, K2(C) the stiffness form with coefficient C, K1(G) the advective
//! form built from the flux Jacobian, and H collects forcing and boundary
//! lift contributions.
//!
//! Unknowns are stored component-major: entry p*(N-1) + (k-1) holds component
//! p at interior node k.

use nalgebra::{DMatrix, DVector};

use crate::error::{PpssError, Result};
use crate::legendre::SpectralGrid;
use crate::sdirk::StageSystem;
use crate::system::HomogenizedSystem;

/// Stiffness form: block (p, q) is the interior block of
/// D1^T diag(w_h c_pq(U_h)) D1, with the coefficient sampled at every node
/// including the endpoints.
pub fn k2_matrix(grid: &SpectralGrid, coeff: &[DMatrix<f64>], dim: usize) -> DMatrix<f64> {
    let n = grid.n;
    let ni = n - 1;
    let d1_int = grid.d1.columns(1, ni);
    let mut out = DMatrix::zeros(dim * ni, dim * ni);
    for p in 0..dim {
        for q in 0..dim {
            let mut scaled = d1_int.clone_owned();
            for h in 0..=n {
                let f = grid.weights[h] * coeff[h][(p, q)];
                scaled.row_mut(h).scale_mut(f);
            }
            let block = d1_int.transpose() * scaled;
            out.view_mut((p * ni, q * ni), (ni, ni)).copy_from(&block);
        }
    }
    out
}

/// Advective form: block (p, q) has rows w_j g_pq(U_j) times the interior
/// columns of row j of D1.
pub fn k1_matrix(grid: &SpectralGrid, jac: &[DMatrix<f64>], dim: usize) -> DMatrix<f64> {
    let n = grid.n;
    let ni = n - 1;
    let mut out = DMatrix::zeros(dim * ni, dim * ni);
    for j in 1..n {
        let wj = grid.weights[j];
        for p in 0..dim {
            for q in 0..dim {
                let g = wj * jac[j][(p, q)];
                for k in 1..n {
                    out[(p * ni + j - 1, q * ni + k - 1)] = g * grid.d1[(j, k)];
                }
            }
        }
    }
    out
}

/// Lumped mass matrix: interior quadrature weights repeated per component.
pub fn k0_matrix(grid: &SpectralGrid, dim: usize) -> DMatrix<f64> {
    let ni = grid.n - 1;
    let mut out = DMatrix::zeros(dim * ni, dim * ni);
    for p in 0..dim {
        for k in 1..grid.n {
            out[(p * ni + k - 1, p * ni + k - 1)] = grid.weights[k];
        }
    }
    out
}

/// Solve K x = r exploiting the 2 x 2 block structure of the mass operator:
/// factor the leading block, form the Schur complement of the trailing block
/// and back-substitute. Falls back to a dense factorization for d != 2.
pub fn block_lu_solve(k: &DMatrix<f64>, r: &DVector<f64>, dim: usize) -> Result<DVector<f64>> {
    if dim != 2 {
        let lu = k.clone().lu();
        return lu.solve(r).ok_or(PpssError::SingularMass);
    }
    let m = k.nrows() / 2;
    let k11 = k.view((0, 0), (m, m)).clone_owned();
    let k12 = k.view((0, m), (m, m)).clone_owned();
    let k21 = k.view((m, 0), (m, m)).clone_owned();
    let k22 = k.view((m, m), (m, m)).clone_owned();
    let lu11 = k11.lu();
    let k_tilde = lu11.solve(&k12).ok_or(PpssError::SingularK11)?;
    let schur = k22 - &k21 * &k_tilde;
    let lu_s = schur.lu();

    let r1 = r.rows(0, m).clone_owned();
    let r2 = r.rows(m, m).clone_owned();
    let y1 = lu11.solve(&r1).ok_or(PpssError::SingularK11)?;
    let x2 = lu_s.solve(&(r2 - &k21 * &y1)).ok_or(PpssError::SingularSchur)?;
    let x1 = y1 - &k_tilde * &x2;

    let mut x = DVector::zeros(2 * m);
    x.rows_mut(0, m).copy_from(&x1);
    x.rows_mut(m, m).copy_from(&x2);
    Ok(x)
}

/// Assembled spatial operators for one problem on one grid.
pub struct GniOperator {
    pub hs: HomogenizedSystem,
    pub grid: SpectralGrid,
    cached_mass: Option<DMatrix<f64>>,
    cached_k2b: Option<DMatrix<f64>>,
}

impl GniOperator {
    pub fn new(hs: HomogenizedSystem, grid: SpectralGrid) -> Self {
        GniOperator { hs, grid, cached_mass: None, cached_k2b: None }
    }

    pub fn unknowns(&self) -> usize {
        self.hs.sys.dim * (self.grid.n - 1)
    }

    /// Full nodal states u = v + lift at every grid node. The endpoints carry
    /// the lift (i.e. the boundary data) alone.
    pub fn node_states(&self, v: &DVector<f64>, t: f64) -> Vec<DVector<f64>> {
        let n = self.grid.n;
        let d = self.hs.sys.dim;
        let ni = n - 1;
        (0..=n)
            .map(|j| {
                let mut u = self.hs.lift(self.grid.nodes[j], t);
                if j >= 1 && j < n {
                    for p in 0..d {
                        u[p] += v[p * ni + j - 1];
                    }
                }
                u
            })
            .collect()
    }

    /// Mass operator K(v, t) = K0 + s^2 K2(A).
    pub fn mass(&mut self, v: &DVector<f64>, t: f64) -> DMatrix<f64> {
        if self.hs.sys.constant_coefficients {
            if self.cached_mass.is_none() {
                self.cached_mass = Some(self.assemble_mass(v, t));
            }
            return self.cached_mass.as_ref().unwrap().clone();
        }
        self.assemble_mass(v, t)
    }

    fn assemble_mass(&self, v: &DVector<f64>, t: f64) -> DMatrix<f64> {
        let d = self.hs.sys.dim;
        let s = self.hs.scale;
        let states = self.node_states(v, t);
        let a_nodes: Vec<DMatrix<f64>> = states.iter().map(|u| (self.hs.sys.a)(u)).collect();
        k0_matrix(&self.grid, d) + k2_matrix(&self.grid, &a_nodes, d) * (s * s)
    }

    /// Right-hand side (s^2 K2(B) + s K1(G)) v + H at time t.
    pub fn rhs(&mut self, v: &DVector<f64>, t: f64) -> DVector<f64> {
        let n = self.grid.n;
        let d = self.hs.sys.dim;
        let ni = n - 1;
        let s = self.hs.scale;
        let states = self.node_states(v, t);

        let k2b = if self.hs.sys.constant_coefficients {
            if self.cached_k2b.is_none() {
                let b_nodes: Vec<DMatrix<f64>> = states.iter().map(|u| (self.hs.sys.b)(u)).collect();
                self.cached_k2b = Some(k2_matrix(&self.grid, &b_nodes, d) * (s * s));
            }
            self.cached_k2b.as_ref().unwrap().clone()
        } else {
            let b_nodes: Vec<DMatrix<f64>> = states.iter().map(|u| (self.hs.sys.b)(u)).collect();
            k2_matrix(&self.grid, &b_nodes, d) * (s * s)
        };
        let jac: Vec<DMatrix<f64>> = states.iter().map(|u| (self.hs.sys.dg)(u)).collect();
        let k1 = k1_matrix(&self.grid, &jac, d) * s;

        let mut out = (k2b + k1) * v;

        // Boundary-lift and forcing loads.
        let sigma = self.hs.lift_slope(t);
        let sigma_t = self.hs.lift_slope_t(t);
        // Gradient-type load q_h = B(U_h) sigma - A(U_h) sigma', tested
        // against the cardinal derivatives.
        let q_nodes: Vec<DVector<f64>> = states
            .iter()
            .map(|u| (self.hs.sys.b)(u) * &sigma - (self.hs.sys.a)(u) * &sigma_t)
            .collect();
        for j in 1..n {
            let xi = self.grid.nodes[j];
            let x = self.hs.physical_x(xi);
            let wj = self.grid.weights[j];
            let gamma = (self.hs.sys.gamma)(&states[j], x, t);
            let lift_t = self.hs.lift_t(xi, t);
            let adv = &jac[j] * &sigma;
            for p in 0..d {
                let mut load = wj * (gamma[p] - lift_t[p] + s * adv[p]);
                let mut grad = 0.0;
                for h in 0..=n {
                    grad += self.grid.weights[h] * q_nodes[h][p] * self.grid.d1[(h, j)];
                }
                load += s * s * grad;
                out[p * ni + j - 1] += load;
            }
        }
        out
    }

    /// Nodal interpolant of the initial data, with the lift at t = 0 removed.
    pub fn initial_state(&self) -> DVector<f64> {
        let n = self.grid.n;
        let d = self.hs.sys.dim;
        let ni = n - 1;
        let mut v = DVector::zeros(d * ni);
        for j in 1..n {
            let xi = self.grid.nodes[j];
            let u0 = (self.hs.sys.u0)(self.hs.physical_x(xi));
            let lift = self.hs.lift(xi, 0.0);
            for p in 0..d {
                v[p * ni + j - 1] = u0[p] - lift[p];
            }
        }
        v
    }
}

impl StageSystem for GniOperator {
    fn unknowns(&self) -> usize {
        self.unknowns()
    }

    fn rhs(&mut self, u: &DVector<f64>, t: f64) -> DVector<f64> {
        GniOperator::rhs(self, u, t)
    }

    fn solve_mass(&mut self, u: &DVector<f64>, t: f64, r: &DVector<f64>) -> Result<DVector<f64>> {
        let k = self.mass(u, t);
        block_lu_solve(&k, r, self.hs.sys.dim)
    }
}
