//! Traveling-wave analysis for the scalar cubic-flux model
//!
//! ```text
//! u_t + (u^3)_x = eps u_xx + delta u_xxt.
//! ```
//!
//! In the frame y = x - lambda t a profile connecting u_minus to u_plus
//! solves the second-order equation
//!
//! ```text
//! -lambda (u - u_minus) + (u^3 - u_minus^3) = alpha u_y + lambda u_yy,
//! ```
//!
//! written here in the sign convention under which the closed-form tanh
//! profile below has zero residual (the equivalent first-order system is
//! `phase_field`). alpha = eps / sqrt(delta) balances diffusion against
//! dispersion; the pure limits are handled by `expand_diffusive` and
//! `classify_dispersive`.

use nalgebra::Complex;

use crate::error::{PpssError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Balanced,
    Diffusive,
    Dispersive,
}

#[derive(Debug, Clone, Copy)]
pub struct TravelingWaveProblem {
    pub u_minus: f64,
    pub u_plus: f64,
    pub regime: Regime,
    /// eps / sqrt(delta) in the balanced regime.
    pub alpha: f64,
    /// Expansion parameter in the diffusive and dispersive regimes.
    pub eps_small: f64,
}

impl TravelingWaveProblem {
    /// Rankine-Hugoniot speed, recomputed on demand.
    pub fn lambda(&self) -> f64 {
        shock_speed(self.u_minus, self.u_plus)
    }
}

/// Jump speed of the cubic flux: (u_-^3 - u_+^3)/(u_- - u_+).
pub fn shock_speed(u_minus: f64, u_plus: f64) -> f64 {
    u_minus * u_minus + u_minus * u_plus + u_plus * u_plus
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumType {
    Repulsor,
    Saddle,
    Attractor,
    Center,
}

/// Classify from an eigenvalue pair: a real sign change is a saddle, equal
/// real-part signs give repulsor/attractor, and a vanishing real part a
/// center.
fn classify_pair(mu: [Complex<f64>; 2]) -> EquilibriumType {
    let tol = 1e-12;
    let (r0, r1) = (mu[0].re, mu[1].re);
    if mu[0].im.abs() > tol {
        if r0 > tol {
            EquilibriumType::Repulsor
        } else if r0 < -tol {
            EquilibriumType::Attractor
        } else {
            EquilibriumType::Center
        }
    } else if r0 > tol && r1 > tol {
        EquilibriumType::Repulsor
    } else if r0 < -tol && r1 < -tol {
        EquilibriumType::Attractor
    } else if r0 * r1 < 0.0 {
        EquilibriumType::Saddle
    } else {
        EquilibriumType::Center
    }
}

#[derive(Debug, Clone)]
pub struct EquilibriumReport {
    /// The three rest states in the order (u0, u1, u2) = (u_minus, middle, lowest).
    pub states: [f64; 3],
    /// Discriminant 4 lambda - 3 u_minus^2 of the companion quadratic.
    pub delta1: f64,
    pub eigenvalues: [[Complex<f64>; 2]; 3],
    pub types: [EquilibriumType; 3],
}

/// Rest points of the profile equation for left state `u_minus` and speed
/// `lambda`: u0 = u_minus and the roots of u^2 + u u_minus + u_minus^2 =
/// lambda. Eigenvalues follow mu_pm(u) = (alpha/lambda pm sqrt(Delta))/2 with
/// Delta = alpha^2/lambda^2 + 4(1 - 3u^2/lambda).
pub fn equilibria(u_minus: f64, lambda: f64, alpha: f64) -> Result<EquilibriumReport> {
    let delta1 = 4.0 * lambda - 3.0 * u_minus * u_minus;
    if delta1 < 0.0 {
        return Err(PpssError::InvalidWaveStates(format!(
            "complex companion roots: 4 lambda - 3 u_minus^2 = {delta1} < 0"
        )));
    }
    let sq = delta1.sqrt();
    let states = [u_minus, (-u_minus + sq) / 2.0, (-u_minus - sq) / 2.0];
    let mut eigenvalues = [[Complex::new(0.0, 0.0); 2]; 3];
    let mut types = [EquilibriumType::Center; 3];
    for (i, &u) in states.iter().enumerate() {
        let disc = alpha * alpha / (lambda * lambda) + 4.0 * (1.0 - 3.0 * u * u / lambda);
        let half = alpha / (2.0 * lambda);
        let mu = if disc >= 0.0 {
            let s = disc.sqrt() / 2.0;
            [Complex::new(half + s, 0.0), Complex::new(half - s, 0.0)]
        } else {
            let s = (-disc).sqrt() / 2.0;
            [Complex::new(half, s), Complex::new(half, -s)]
        };
        eigenvalues[i] = mu;
        types[i] = classify_pair(mu);
    }
    Ok(EquilibriumReport { states, delta1, eigenvalues, types })
}

/// Closed-form heteroclinic profile
///
/// ```text
/// u(y) = a - (u_minus - a) tanh((u_minus - a) y / sqrt(2 lambda)),
/// a = alpha / (3 sqrt(2 lambda)),
/// ```
///
/// valid when u_minus > (2/3) sqrt(2/lambda) alpha.
pub fn explicit_profile(u_minus: f64, alpha: f64, lambda: f64, y: f64) -> Result<f64> {
    check_profile_validity(u_minus, alpha, lambda)?;
    let a = alpha / (3.0 * (2.0 * lambda).sqrt());
    let r = u_minus - a;
    Ok(a - r * (r * y / (2.0 * lambda).sqrt()).tanh())
}

fn check_profile_validity(u_minus: f64, alpha: f64, lambda: f64) -> Result<()> {
    if lambda <= 0.0 {
        return Err(PpssError::InvalidWaveStates(format!("speed lambda = {lambda} must be positive")));
    }
    if u_minus <= (2.0 / 3.0) * (2.0 / lambda).sqrt() * alpha {
        return Err(PpssError::InvalidWaveStates(format!(
            "u_minus = {u_minus} violates u_minus > (2/3) sqrt(2/lambda) alpha"
        )));
    }
    Ok(())
}

/// Residual of the profile equation along the closed form at `y`, using
/// analytic derivatives of the tanh expression.
pub fn explicit_profile_residual(u_minus: f64, alpha: f64, lambda: f64, y: f64) -> Result<f64> {
    check_profile_validity(u_minus, alpha, lambda)?;
    let a = alpha / (3.0 * (2.0 * lambda).sqrt());
    let r = u_minus - a;
    let k = r / (2.0 * lambda).sqrt();
    let s = (k * y).tanh();
    let sech2 = 1.0 - s * s;
    let u = a - r * s;
    let uy = -r * k * sech2;
    let uyy = 2.0 * r * k * k * s * sech2;
    Ok(-lambda * (u - u_minus) + (u.powi(3) - u_minus.powi(3)) - alpha * uy - lambda * uyy)
}

/// First-order phase field of the profile equation:
/// (u', v') = (v, -(alpha/lambda) v - (g(u) - g(u_minus))), g(u) = u - u^3/lambda.
pub fn phase_field(u: f64, v: f64, u_minus: f64, lambda: f64, alpha: f64) -> (f64, f64) {
    let g = |w: f64| w - w * w * w / lambda;
    (v, -(alpha / lambda) * v - (g(u) - g(u_minus)))
}

/// First integral of the alpha = 0 field: H = v^2/2 + int_{u_minus}^{u} (g - g(u_minus)).
pub fn hamiltonian(u: f64, v: f64, u_minus: f64, lambda: f64) -> f64 {
    let g_minus = u_minus - u_minus.powi(3) / lambda;
    let anti = |w: f64| w * w / 2.0 - w.powi(4) / (4.0 * lambda) - g_minus * w;
    v * v / 2.0 + anti(u) - anti(u_minus)
}

fn rk4_phase(u: f64, v: f64, h: f64, u_minus: f64, lambda: f64, alpha: f64) -> (f64, f64) {
    let f = |u: f64, v: f64| phase_field(u, v, u_minus, lambda, alpha);
    let (k1u, k1v) = f(u, v);
    let (k2u, k2v) = f(u + 0.5 * h * k1u, v + 0.5 * h * k1v);
    let (k3u, k3v) = f(u + 0.5 * h * k2u, v + 0.5 * h * k2v);
    let (k4u, k4v) = f(u + h * k3u, v + h * k3v);
    (
        u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

/// A sampled phase-plane trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl Trajectory {
    /// Ordinate where u crosses `level`, by linear interpolation; used to
    /// align translation-invariant profiles.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        for i in 1..self.u.len() {
            let (a, b) = (self.u[i - 1], self.u[i]);
            if (a - level) * (b - level) <= 0.0 && a != b {
                let frac = (level - a) / (b - a);
                return Some(self.y[i - 1] + frac * (self.y[i] - self.y[i - 1]));
            }
        }
        None
    }
}

const SHOOT_STEP: f64 = 1e-3;
const SHOOT_Y_MAX: f64 = 200.0;
const SHOOT_BALL: f64 = 1e-6;

/// Shoot along the unstable manifold of (u_minus, 0) and detect approach to
/// (u_plus, 0). Succeeds when the orbit enters a ball of radius 1e-6 around
/// the target; otherwise reports the closest approach.
pub fn shoot_connection(problem: &TravelingWaveProblem) -> Result<Trajectory> {
    let um = problem.u_minus;
    let target = problem.u_plus;
    let lambda = problem.lambda();
    let alpha = problem.alpha;
    check_profile_validity(um, alpha, lambda)?;

    // Unstable eigenvector (1, mu_plus) of the linearization at (u_minus, 0).
    let departure = 3.0 * um * um / lambda - 1.0;
    if departure <= 0.0 {
        return Err(PpssError::InvalidWaveStates(format!(
            "left state u_minus = {um} is not a saddle at speed {lambda}"
        )));
    }
    let mu_plus = 0.5 * (-alpha / lambda + (alpha * alpha / (lambda * lambda) + 4.0 * departure).sqrt());
    let dir = (target - um).signum();
    let eta = 1e-6 * (um - target).abs();
    let mut u = um + dir * eta;
    let mut v = dir * eta * mu_plus;

    let bound = 10.0 * (um.abs() + target.abs() + 1.0);
    let mut traj = Trajectory { y: vec![0.0], u: vec![u], v: vec![v] };
    let mut closest = f64::INFINITY;
    let mut closest_state = [u, v];
    let steps = (SHOOT_Y_MAX / SHOOT_STEP) as usize;
    for i in 1..=steps {
        let (nu, nv) = rk4_phase(u, v, SHOOT_STEP, um, lambda, alpha);
        u = nu;
        v = nv;
        traj.y.push(i as f64 * SHOOT_STEP);
        traj.u.push(u);
        traj.v.push(v);
        let dist = ((u - target) * (u - target) + v * v).sqrt();
        if dist < closest {
            closest = dist;
            closest_state = [u, v];
        }
        if dist <= SHOOT_BALL {
            return Ok(traj);
        }
        if !u.is_finite() || u.abs() > bound {
            break;
        }
    }
    Err(PpssError::ShootingFailed { closest, u: closest_state })
}

/// Sampled terms of the small-eps expansion u = u0 + eps u1 + eps^2 u2 in the
/// diffusion-dominated regime.
#[derive(Debug, Clone)]
pub struct DiffusiveExpansion {
    pub eta: Vec<f64>,
    pub u0: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

const EXPAND_H: f64 = 1e-3;
const EXPAND_ETA_MAX: f64 = 40.0;

fn expansion_rhs(w: [f64; 3], u_minus: f64, lambda: f64) -> [f64; 3] {
    let [u0, u1, u2] = w;
    let c = -lambda * (u0 - u_minus) + (u0.powi(3) - u_minus.powi(3));
    let cp = 3.0 * u0 * u0 - lambda;
    let d0 = c;
    // Analytic eta-derivatives of u0 feed the higher-order right-hand sides.
    let u0_pp = cp * d0;
    let d1 = cp * u1 + lambda * u0_pp;
    let u0_ppp = 6.0 * u0 * d0 * d0 + cp * u0_pp;
    let u1_pp = 6.0 * u0 * d0 * u1 + cp * d1 + lambda * u0_ppp;
    let d2 = cp * u2 + 3.0 * u0 * u1 * u1 + lambda * u1_pp;
    [d0, d1, d2]
}

fn rk4_expansion(w: [f64; 3], h: f64, u_minus: f64, lambda: f64) -> [f64; 3] {
    let add = |a: [f64; 3], b: [f64; 3], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
    let k1 = expansion_rhs(w, u_minus, lambda);
    let k2 = expansion_rhs(add(w, k1, 0.5 * h), u_minus, lambda);
    let k3 = expansion_rhs(add(w, k2, 0.5 * h), u_minus, lambda);
    let k4 = expansion_rhs(add(w, k3, h), u_minus, lambda);
    [
        w[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        w[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        w[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ]
}

/// Integrate the expansion equations outward from eta = 0 with the
/// translation pins u0(0) = (u_minus + u_plus)/2, u1(0) = u2(0) = 0; both
/// integration directions are stable, which enforces decay of u1, u2 at the
/// tails.
pub fn expand_diffusive(u_minus: f64, u_plus: f64, orders: usize) -> Result<DiffusiveExpansion> {
    if u_minus < u_plus {
        return Err(PpssError::InvalidWaveStates(format!(
            "diffusive profile requires u_minus >= u_plus, got ({u_minus}, {u_plus})"
        )));
    }
    let lambda = shock_speed(u_minus, u_plus);
    let half = (EXPAND_ETA_MAX / EXPAND_H).round() as usize;
    let total = 2 * half + 1;
    let mut eta = vec![0.0; total];
    let mut u0 = vec![0.0; total];
    let mut u1 = vec![0.0; total];
    let mut u2 = vec![0.0; total];
    for (i, e) in eta.iter_mut().enumerate() {
        *e = (i as f64 - half as f64) * EXPAND_H;
    }

    if u_minus == u_plus {
        u0.iter_mut().for_each(|v| *v = u_minus);
        return Ok(DiffusiveExpansion { eta, u0, u1, u2 });
    }

    let mid = [(u_minus + u_plus) / 2.0, 0.0, 0.0];
    let store = |arr0: &mut [f64], arr1: &mut [f64], arr2: &mut [f64], i: usize, w: [f64; 3]| {
        arr0[i] = w[0];
        arr1[i] = w[1];
        arr2[i] = w[2];
    };
    store(&mut u0, &mut u1, &mut u2, half, mid);
    let mut w = mid;
    for i in 1..=half {
        w = rk4_expansion(w, EXPAND_H, u_minus, lambda);
        store(&mut u0, &mut u1, &mut u2, half + i, w);
    }
    w = mid;
    for i in 1..=half {
        w = rk4_expansion(w, -EXPAND_H, u_minus, lambda);
        store(&mut u0, &mut u1, &mut u2, half - i, w);
    }

    for i in 1..total {
        if u0[i] > u0[i - 1] + 1e-10 {
            return Err(PpssError::InvalidWaveStates(
                "leading-order profile is not monotone decreasing".into(),
            ));
        }
    }
    if orders < 1 {
        u1.iter_mut().for_each(|v| *v = 0.0);
    }
    if orders < 2 {
        u2.iter_mut().for_each(|v| *v = 0.0);
    }
    Ok(DiffusiveExpansion { eta, u0, u1, u2 })
}

/// Classification of the three rest states in the dispersion-dominated limit,
/// where the eigenvalues are pm sqrt((lambda - 3u^2)/lambda): a saddle needs
/// lambda > 3u^2, which at most one rest state can satisfy, so no
/// saddle-saddle connection (and hence no traveling wave) exists.
#[derive(Debug, Clone)]
pub struct DispersiveReport {
    pub lambda: f64,
    pub states: [f64; 3],
    pub types: [EquilibriumType; 3],
    /// True when fewer than two saddles exist.
    pub nonexistence: bool,
}

pub fn classify_dispersive(u_minus: f64, u_plus: f64) -> DispersiveReport {
    let lambda = shock_speed(u_minus, u_plus);
    let states = [u_minus, u_plus, -(u_minus + u_plus)];
    let mut types = [EquilibriumType::Center; 3];
    let mut saddles = 0;
    for (i, &u) in states.iter().enumerate() {
        if lambda > 3.0 * u * u {
            types[i] = EquilibriumType::Saddle;
            saddles += 1;
        }
    }
    DispersiveReport { lambda, states, types, nonexistence: saddles < 2 }
}
