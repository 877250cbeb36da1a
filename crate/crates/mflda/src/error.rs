use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A grid was constructed with an unusable node count.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Density values violate positivity beyond the clipping tolerance.
    #[error("negative density: min value {min} at node {node} is below -1e-12")]
    NegativeDensity { min: f64, node: usize },

    /// Non-finite values where finite reals are required.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// The pushforward map 1 + t*phi'' lost invertibility.
    #[error("degenerate Jacobian in pushforward: min(1 + t*phi'') = {min_jac} at t = {t}")]
    JacobianDegenerate { t: f64, min_jac: f64 },

    /// Pushforward renormalization drifted further than the contract allows.
    #[error("pushforward mass renormalization factor {factor} deviates from 1 beyond 1e-8")]
    RenormOutOfTolerance { factor: f64 },

    /// A payoff description failed validation.
    #[error("invalid payoff: {0}")]
    InvalidPayoff(String),

    /// Best-response iteration did not reach the requested tolerance.
    #[error(
        "equilibrium iteration not converged after {iterations} iterations \
         (residual_mu = {residual_mu:.3e}, residual_nu = {residual_nu:.3e})"
    )]
    NotConverged {
        residual_mu: f64,
        residual_nu: f64,
        iterations: usize,
    },

    /// An equilibrium pair failed re-certification.
    #[error("certification failed: {check} = {value:.3e} exceeds {limit:.3e}")]
    CertificationFailed {
        check: &'static str,
        value: f64,
        limit: f64,
    },

    /// KL divergence requested against a reference that vanishes on the support.
    #[error("support mismatch in KL: reference vanishes at node {node} where density is {value}")]
    SupportMismatch { node: usize, value: f64 },

    /// The exact transport oracle is restricted to small grids.
    #[error("grid too large for exact transport oracle: N = {n} > {max}")]
    GridTooLarge { n: usize, max: usize },

    /// Inverse iteration failed to settle on an eigenpair.
    #[error("eigensolver not converged after {iterations} iterations (last shift {shift})")]
    EigenNotConverged { iterations: usize, shift: f64 },

    /// The Rayleigh route requires the Gibbs relation between density and potential.
    #[error("density is not the Gibbs measure of the supplied potential (residual {residual:.3e})")]
    GibbsMismatch { residual: f64 },

    /// Time stepping kept producing negative densities after all halvings.
    #[error("PDE step unstable at t = {t}: dt halved {halvings} times, min density {min_density:.3e}")]
    StepUnstable {
        t: f64,
        halvings: usize,
        min_density: f64,
    },

    /// Rate fitting was asked to work with too few samples.
    #[error("insufficient data for rate fit: {found} samples in window, need {need}")]
    InsufficientData { found: usize, need: usize },

    /// Rate fitting encountered a non-positive energy in the window.
    #[error("non-positive energy E = {value:.3e} at t = {t} inside fit window")]
    NonPositiveEnergy { t: f64, value: f64 },

    /// Malformed input file (CSV/JSON schema violations).
    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
