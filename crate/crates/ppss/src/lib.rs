//! Spectral Legendre-Galerkin solver for one-dimensional systems of the form
//!
//! ```text
//! u_t - (A(u) u_x)_xt = -(B(u) u_x)_x + G(u)_x + gamma(u, x, t)
//! ```
//!
//! with Dirichlet boundary data, together with implicit SSP Runge-Kutta time
//! integration, traveling-wave analysis for a scalar cubic model, and a set of
//! reference benchmark problems.

pub mod assembly;
pub mod config;
pub mod driver;
pub mod error;
pub mod expr;
pub mod legendre;
pub mod norms;
pub mod problems;
pub mod sdirk;
pub mod system;
pub mod waves;

pub use error::{PpssError, Result};
pub use legendre::{build_grid, gauss_rule, legendre_eval, SpectralGrid};
