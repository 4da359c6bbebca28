//! Error type shared by every module of the solver.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A potential description failed structural validation (overlapping
    /// regions, gaps, non-finite numbers, duplicate point positions, ...).
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    /// A potential file could not be parsed. `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A delta-prime strength sits on the resonant value where the matching
    /// condition degenerates and the transmission ratio diverges.
    /// `beta_tilde` is the dimensionless strength `m*b/hbar^2`.
    #[error("resonant delta-prime strength: m*b/hbar^2 = {beta_tilde} lies within 1e-12 of +1 or -1")]
    ResonantDeltaPrime { beta_tilde: f64 },

    /// Scattering was requested at an energy that does not propagate on the
    /// incident side.
    #[error("no propagating incident channel: E = {energy} does not exceed the incident asymptotic height U = {asymptote}")]
    NoPropagatingChannel { energy: f64, asymptote: f64 },

    /// The input impedance coincides with the pole of the reflection map
    /// (a perfectly absorbing load), so `r` is undefined.
    #[error("reflection undefined: input impedance equals -z of the incident lead")]
    AbsorberPole,

    /// A caller-supplied argument is outside the domain of the operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Normalization was requested for samples that do not describe a
    /// square-integrable state.
    #[error("not normalizable: {0}")]
    NotNormalizable(String),
}
