//! Crate-wide error type.

use crate::family::Location;
use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// Mathematical "negative" outcomes (a point being non-Fredholm, a check
/// returning false) are ordinary return values, not errors; errors mean a
/// precondition was violated or a computation cannot certify its result.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed parameter space: {0}")]
    Structure(String),

    #[error("truncation size {given} too small; minimum admissible n is {min_admissible}")]
    TruncationTooSmall { given: usize, min_admissible: usize },

    #[error("operators of different kinds (or incompatible diagonal shapes) cannot be combined")]
    KindMismatch,

    #[error(
        "symbol curve passes within {gap:.3e} of the target point (margin {margin:.3e}); \
         winding is undefined on the essential spectrum"
    )]
    OnEssentialSpectrum { gap: f64, margin: f64 },

    #[error("{samples} angular samples insufficient for symbol degree {degree}; need more than {min_samples}")]
    TooFewThetaSamples {
        samples: usize,
        degree: i64,
        min_samples: usize,
    },

    #[error("operator is not Fredholm at the requested point (essential gap {gap:.3e} < margin {margin:.3e})")]
    NotFredholmPoint { gap: f64, margin: f64 },

    #[error(
        "nullity/defect estimates did not stabilize up to truncation size {max_n}; \
         try a larger starting size"
    )]
    OracleUnstable { max_n: usize },

    #[error("family is not Fredholm at the requested point; {} offending sample(s), first at {first}", .witnesses.len())]
    NotFredholmFamily {
        witnesses: Vec<(Location, f64)>,
        first: Location,
    },

    #[error(
        "sampled indices disagree within component {component} ({details:?}); \
         the family index is constant per component, so the edge discretization is too coarse"
    )]
    DiscretizationTooCoarse {
        component: u32,
        details: Vec<(Location, i64)>,
    },

    #[error("families live on different parameter spaces (or use different edge sampling)")]
    SpaceMismatch,

    #[error("homotopy path endpoints do not match the given families")]
    PathEndpointsMismatch,

    #[error("invalid polynomial: {0}")]
    InvalidPoly(String),

    #[error("polynomial has a root within {margin:.3e} of the essential spectrum at {root}")]
    RootOnEssentialCurve {
        root: num_complex::Complex64,
        margin: f64,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid sets live on different grids")]
    GridMismatch,

    #[error("sequence did not converge within tolerance: {0}")]
    Inconclusive(String),

    #[error("scenario hypothesis not satisfied: {0}")]
    HypothesisViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
