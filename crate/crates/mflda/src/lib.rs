//! Numerical laboratory for entropy-regularized two-player zero-sum games on
//! the unit circle `T = R/Z`.
//!
//! The saddle functional under study is
//!
//! ```text
//! F(mu, nu) = ∬ f(x,y) dmu(x) dnu(y) + H(mu) - H(nu),
//! ```
//!
//! where `H` is the (negative) differential entropy and `f` a smooth payoff.
//! The crate computes the unique mixed Nash equilibrium (a joint Gibbs fixed
//! point), the spectral gap that governs local convergence, integrates the
//! coupled Langevin descent-ascent PDE
//!
//! ```text
//! ∂t mu = Δmu + ∇·(mu ∇V_nu),    ∂t nu = Δnu - ∇·(nu ∇U_mu),
//! ```
//!
//! together with its interacting-particle counterpart, and measures
//! trajectories with a W2 / KL / Nikaido-Isoda metric stack.
//!
//! Modules map one-to-one onto the pipeline stages:
//!
//! - [`grid`]: periodic grid, quadrature, spectral calculus, densities.
//! - [`payoff`]: trigonometric payoffs, induced potentials, convexity constant.
//! - [`equilibrium`]: damped best-response solver and certification.
//! - [`geometry`]: entropy, KL, NI error, circular W2, variation formulas.
//! - [`spectral`]: the spectral gap by two independent routes.
//! - [`dynamics`]: IMEX pseudo-spectral PDE integration and particle SDE.
//! - [`harness`]: rate fitting, experiment pipelines, reports.

pub mod dynamics;
pub mod equilibrium;
mod error;
pub mod geometry;
pub mod grid;
pub mod harness;
mod interp;
pub mod payoff;
pub mod spectral;

pub use error::{Error, Result};
