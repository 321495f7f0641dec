//! Two-stage singly diagonally implicit Runge-Kutta schemes with the strong
//! stability preserving tableau
//!
//! ```text
//! a = [[mu, 0], [1 - 2 mu, mu]],  b = [1/2, 1/2],  c = [mu, 1 - mu]
//! ```
//!
//! (mu = 1/2: implicit midpoint family, order 2; mu = (3 + sqrt 3)/6:
//! order 3). Stage systems K(u) du/dt = F(u) are solved by fixed-point
//! iteration with one mass solve per sweep.

use nalgebra::{Complex, DMatrix, DVector, Matrix2, Vector2};

use crate::error::{PpssError, Result};
use crate::legendre::SpectralGrid;

/// An implicit ODE system K(u, t) du/dt = F(u, t) presented through its
/// right-hand side and a mass solve.
pub trait StageSystem {
    fn unknowns(&self) -> usize;
    /// F(u, t).
    fn rhs(&mut self, u: &DVector<f64>, t: f64) -> DVector<f64>;
    /// Solve K(u, t) x = r for x.
    fn solve_mass(&mut self, u: &DVector<f64>, t: f64, r: &DVector<f64>) -> Result<DVector<f64>>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdirkScheme {
    pub mu: f64,
    pub order: usize,
}

impl SdirkScheme {
    /// Order-2 scheme, mu = 1/2.
    pub fn ssp22() -> Self {
        SdirkScheme { mu: 0.5, order: 2 }
    }

    /// Order-3 scheme, mu = (3 + sqrt 3)/6.
    pub fn ssp23() -> Self {
        SdirkScheme { mu: (3.0 + 3.0_f64.sqrt()) / 6.0, order: 3 }
    }

    pub fn a(&self) -> [[f64; 2]; 2] {
        [[self.mu, 0.0], [1.0 - 2.0 * self.mu, self.mu]]
    }

    pub fn b(&self) -> [f64; 2] {
        [0.5, 0.5]
    }

    pub fn c(&self) -> [f64; 2] {
        [self.mu, 1.0 - self.mu]
    }

    /// Stability function R(z) = 1 + z b^T (I - z a)^{-1} 1.
    pub fn stability(&self, z: Complex<f64>) -> Complex<f64> {
        let a = self.a();
        let one = Complex::new(1.0, 0.0);
        let m = Matrix2::new(
            one - z * a[0][0],
            -z * a[0][1],
            -z * a[1][0],
            one - z * a[1][1],
        );
        let rhs = Vector2::new(one, one);
        let w = m.lu().solve(&rhs).expect("stage matrix is singular");
        let b = self.b();
        one + z * (b[0] * w[0] + b[1] * w[1])
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    pub fp_tol: f64,
    pub fp_max_iters: usize,
}

impl SolverConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        SolverConfig { dt, t_final, fp_tol: 1e-10, fp_max_iters: 50 }
    }
}

/// Solve one stage equation u = base + mu dt F(u, t) by fixed-point
/// iteration, starting from the stage base. Returns the stage value and the
/// number of sweeps used.
pub fn fixed_point_solve(
    sys: &mut dyn StageSystem,
    base: &DVector<f64>,
    t_stage: f64,
    mu_dt: f64,
    fp_tol: f64,
    fp_max_iters: usize,
) -> Result<(DVector<f64>, usize)> {
    let mut u = base.clone();
    let mut last_delta = f64::INFINITY;
    for iter in 1..=fp_max_iters {
        let f = sys.rhs(&u, t_stage);
        let x = sys.solve_mass(&u, t_stage, &(f * mu_dt))?;
        let next = base + x;
        last_delta = (&next - &u).amax();
        u = next;
        if last_delta <= fp_tol {
            return Ok((u, iter));
        }
    }
    Err(PpssError::FixedPointStalled { iters: fp_max_iters, delta: last_delta, tol: fp_tol })
}

/// Advance one step of size dt from (t, u). Returns the new state and the
/// total fixed-point sweeps over both stages.
pub fn sdirk_step(
    scheme: SdirkScheme,
    sys: &mut dyn StageSystem,
    u: &DVector<f64>,
    t: f64,
    dt: f64,
    fp_tol: f64,
    fp_max_iters: usize,
) -> Result<(DVector<f64>, usize)> {
    let mu = scheme.mu;
    let c = scheme.c();

    let (u_star, it1) = fixed_point_solve(sys, u, t + c[0] * dt, mu * dt, fp_tol, fp_max_iters)?;
    // The stage relation gives F implicitly: u* = u + mu dt F(u*).
    let f1 = (&u_star - u) / (mu * dt);

    let base2 = u + &f1 * ((1.0 - 2.0 * mu) * dt);
    let (u_dstar, it2) =
        fixed_point_solve(sys, &base2, t + c[1] * dt, mu * dt, fp_tol, fp_max_iters)?;
    let f2 = (&u_dstar - &base2) / (mu * dt);

    let next = u + (f1 + f2) * (dt / 2.0);
    if !next.iter().all(|v| v.is_finite()) {
        return Err(PpssError::NonFiniteState { t: t + dt });
    }
    Ok((next, it1 + it2))
}

/// March from t = 0 to t_final. Returns the final state and the cumulative
/// fixed-point sweep count.
pub fn integrate(
    scheme: SdirkScheme,
    sys: &mut dyn StageSystem,
    u0: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<(DVector<f64>, usize)> {
    let mut u = u0.clone();
    let mut t = 0.0;
    let mut sweeps = 0;
    while t < cfg.t_final - 1e-12 * cfg.t_final.max(1.0) {
        let dt = cfg.dt.min(cfg.t_final - t);
        let (next, it) = sdirk_step(scheme, sys, &u, t, dt, cfg.fp_tol, cfg.fp_max_iters)?;
        u = next;
        t += dt;
        sweeps += it;
    }
    Ok((u, sweeps))
}

/// Induced 2-norm by the largest singular value.
fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

const SSP_DT_CAP: f64 = 1e3;

/// Largest forward-Euler step for the linearized filtered scheme
///
/// ```text
/// || I + eps dt C^{-1} D2 || + dt lip || C^{-1} D1 || <= 1,  C = I - delta D2,
/// ```
///
/// with D1, D2 the interior blocks of the collocation derivative matrices and
/// the induced 2-norm throughout. Returns `SSP_DT_CAP` when the bound never
/// binds and 0 (with a warning) when no positive step satisfies it.
pub fn ssp_max_dt(grid: &SpectralGrid, eps: f64, delta: f64, lip: f64) -> f64 {
    let n = grid.n;
    let ni = n - 1;
    let d1 = grid.d1.view((1, 1), (ni, ni)).clone_owned();
    let d2 = grid.d2.view((1, 1), (ni, ni)).clone_owned();
    let c = DMatrix::identity(ni, ni) - &d2 * delta;
    let c_lu = c.lu();
    let m2 = c_lu.solve(&d2).expect("filter matrix is singular");
    let m1 = c_lu.solve(&d1).expect("filter matrix is singular");
    let m1_norm = spectral_norm(&m1);

    let eye = DMatrix::identity(ni, ni);
    let phi = |dt: f64| spectral_norm(&(&eye + &m2 * (eps * dt))) + dt * lip * m1_norm;

    let tol = 1e-12;
    if phi(SSP_DT_CAP) <= 1.0 + tol {
        return SSP_DT_CAP;
    }
    // Geometric scan for a feasible step, then bisect the boundary.
    let mut lo = 0.0;
    let mut dt = 1e-8;
    while dt < SSP_DT_CAP {
        if phi(dt) <= 1.0 + tol {
            lo = dt;
        } else if lo > 0.0 {
            break;
        }
        dt *= 2.0;
    }
    if lo == 0.0 {
        eprintln!("warning: no positive step satisfies the SSP bound (eps={eps}, delta={delta}, lip={lip})");
        return 0.0;
    }
    let mut hi = (lo * 2.0).min(SSP_DT_CAP);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) <= 1.0 + tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// One forward-Euler step of the filtered semidiscrete conservation law
/// C u' = eps D2 u - D1 f(u), C = I - delta D2.
pub fn filtered_euler_step(
    grid: &SpectralGrid,
    u: &DVector<f64>,
    dt: f64,
    eps: f64,
    delta: f64,
    f: &dyn Fn(f64) -> f64,
) -> DVector<f64> {
    let ni = grid.n - 1;
    let d1 = grid.d1.view((1, 1), (ni, ni)).clone_owned();
    let d2 = grid.d2.view((1, 1), (ni, ni)).clone_owned();
    let c = DMatrix::identity(ni, ni) - &d2 * delta;
    let fu = DVector::from_iterator(ni, u.iter().map(|&v| f(v)));
    let rhs = &d2 * u * eps - &d1 * fu;
    let incr = c.lu().solve(&rhs).expect("filter matrix is singular");
    u + incr * dt
}
