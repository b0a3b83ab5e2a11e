use alloc::vec::Vec;

/// Unified error type for all library operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A scalar argument fell outside its documented domain.
    #[error("{param} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        param: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A sampled quantity was NaN or infinite.
    #[error("{param} is not finite at z = {z} cm")]
    NonFinite { param: &'static str, z: f64 },

    /// A documented contract (normalization, symmetry, convergence) was violated.
    #[error("contract violation: {what} (measured {measure:e}, tolerance {tol:e})")]
    Contract {
        what: &'static str,
        measure: f64,
        tol: f64,
    },

    /// No mid-gap boundary doublet exists where one is required.
    #[error("no boundary doublet at z = 0: found {found} mid-gap states (need 2), lambda(0) = {lambda}")]
    NoBoundaryState { found: usize, lambda: f64 },

    /// A probability collection summed to zero where a ratio is needed.
    #[error("empty collection: {what}")]
    EmptyCollection { what: &'static str },

    /// A coupling cannot be realized by the exponential separation law.
    #[error("bond {bond} at z = {z} cm: coupling {kappa} 1/cm exceeds geometry limit {limit} 1/cm")]
    GeometryDomain {
        bond: usize,
        z: f64,
        kappa: f64,
        limit: f64,
    },

    /// Root bracketing failed; carries the diagnostic sweep of (parameter, objective).
    #[error("no sign change over the expanded bracket ({} sweep points recorded)", sweep.len())]
    NoSignChange { sweep: Vec<(f64, f64)> },
}

pub type Result<T> = core::result::Result<T, Error>;
