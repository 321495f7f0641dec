//! Problem definition for systems of the form
//!
//! ```text
//! (I - d/dx (A(u) d/dx)) u_t = -(B(u) u_x)_x + G(u)_x + gamma(u, x, t)
//! ```
//!
//! on an interval with Dirichlet data, plus the change of variables that maps
//! the problem to homogeneous boundary conditions on [-1, 1].

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

/// State-dependent d x d coefficient matrix.
pub type MatFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;
/// Directional derivative of a coefficient matrix: (u, w) -> dC(u; w).
pub type DirMatFn = Arc<dyn Fn(&DVector<f64>, &DVector<f64>) -> DMatrix<f64> + Send + Sync>;
/// Forcing term (u, x, t) -> d-vector.
pub type SourceFn = Arc<dyn Fn(&DVector<f64>, f64, f64) -> DVector<f64> + Send + Sync>;
/// Time-dependent boundary value, t -> d-vector.
pub type BoundaryFn = Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>;
/// Spatial profile, x -> d-vector.
pub type ProfileFn = Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>;

/// A complete initial-boundary value problem.
#[derive(Clone)]
pub struct SystemDef {
    pub dim: usize,
    pub domain: (f64, f64),
    /// Regularization matrix A(u).
    pub a: MatFn,
    /// Diffusion matrix B(u).
    pub b: MatFn,
    /// Flux Jacobian G'(u).
    pub dg: MatFn,
    /// Forcing gamma(u, x, t).
    pub gamma: SourceFn,
    pub g_left: BoundaryFn,
    pub g_right: BoundaryFn,
    pub u0: ProfileFn,
    /// True when A and B do not depend on u, which lets the semidiscrete
    /// operators be assembled once.
    pub constant_coefficients: bool,
}

impl std::fmt::Debug for SystemDef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SystemDef")
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("constant_coefficients", &self.constant_coefficients)
            .finish_non_exhaustive()
    }
}

const LIFT_FD_STEP: f64 = 1e-6;

/// A system transplanted to the reference interval [-1, 1] with the affine
/// boundary lift split off, so that the unknown vanishes at both endpoints.
#[derive(Debug, Clone)]
pub struct HomogenizedSystem {
    pub sys: SystemDef,
    /// Jacobian of the map to [-1, 1]: s = 2 / (x_R - x_L).
    pub scale: f64,
}

/// Split off the affine-in-space boundary interpolant of `sys`.
pub fn homogenize(sys: SystemDef) -> HomogenizedSystem {
    let (xl, xr) = sys.domain;
    HomogenizedSystem { scale: 2.0 / (xr - xl), sys }
}

impl HomogenizedSystem {
    /// Physical coordinate of a reference point xi in [-1, 1].
    pub fn physical_x(&self, xi: f64) -> f64 {
        let (xl, xr) = self.sys.domain;
        xl + (xi + 1.0) * (xr - xl) / 2.0
    }

    /// Boundary lift u_bar(xi, t) = sigma(t) xi + mean(t).
    pub fn lift(&self, xi: f64, t: f64) -> DVector<f64> {
        let gl = (self.sys.g_left)(t);
        let gr = (self.sys.g_right)(t);
        (&gr - &gl) * (xi / 2.0) + (gr + gl) * 0.5
    }

    /// Slope of the lift in the reference coordinate, sigma(t) = (g_R - g_L)/2.
    pub fn lift_slope(&self, t: f64) -> DVector<f64> {
        ((self.sys.g_right)(t) - (self.sys.g_left)(t)) * 0.5
    }

    /// Time derivative of the lift at (xi, t), by central differencing of the
    /// boundary closures.
    pub fn lift_t(&self, xi: f64, t: f64) -> DVector<f64> {
        (self.lift(xi, t + LIFT_FD_STEP) - self.lift(xi, t - LIFT_FD_STEP)) / (2.0 * LIFT_FD_STEP)
    }

    /// Time derivative of the lift slope.
    pub fn lift_slope_t(&self, t: f64) -> DVector<f64> {
        (self.lift_slope(t + LIFT_FD_STEP) - self.lift_slope(t - LIFT_FD_STEP))
            / (2.0 * LIFT_FD_STEP)
    }
}

/// Space-time derivative set of a known exact solution, used to manufacture
/// forcing terms. Each closure maps (x, t) to a d-vector.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: Arc<dyn Fn(f64, f64) -> DVector<f64> + Send + Sync>,
    pub u_t: Arc<dyn Fn(f64, f64) -> DVector<f64> + Send + Sync>,
    pub u_x: Arc<dyn Fn(f64, f64) -> DVector<f64> + Send + Sync>,
    pub u_xx: Arc<dyn Fn(f64, f64) -> DVector<f64> + Send + Sync>,
    pub u_xt: Arc<dyn Fn(f64, f64) -> DVector<f64> + Send + Sync>,
    pub u_xxt: Arc<dyn Fn(f64, f64) -> DVector<f64> + Send + Sync>,
}

/// Forcing that makes `exact` solve the system with coefficients `a`, `b` and
/// flux Jacobian `dg`:
///
/// ```text
/// gamma(x, t) = u_t - (dA(u; u_x) u_xt + A(u) u_xxt)
///                   + (dB(u; u_x) u_x  + B(u) u_xx) - G'(u) u_x
/// ```
///
/// with every derivative evaluated at the exact solution. The state argument
/// of the returned closure is ignored.
pub fn manufacture_source(
    a: MatFn,
    da_dir: DirMatFn,
    b: MatFn,
    db_dir: DirMatFn,
    dg: MatFn,
    exact: ExactSolution,
) -> SourceFn {
    Arc::new(move |_state, x, t| {
        let u = (exact.u)(x, t);
        let ut = (exact.u_t)(x, t);
        let ux = (exact.u_x)(x, t);
        let uxx = (exact.u_xx)(x, t);
        let uxt = (exact.u_xt)(x, t);
        let uxxt = (exact.u_xxt)(x, t);
        let reg = da_dir(&u, &ux) * &uxt + a(&u) * &uxxt;
        let diff = db_dir(&u, &ux) * &ux + b(&u) * &uxx;
        let flux = dg(&u) * &ux;
        ut - reg + diff - flux
    })
}
