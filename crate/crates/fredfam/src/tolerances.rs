//! Numerical tolerances shared across the engines.

/// Tolerance bundle for Fredholm tests and the SVD oracle.
///
/// Defaults: a Fredholm margin well above double-precision noise, a relative
/// rank threshold for singular values, enough angular samples for symbols of
/// degree up to a few hundred, and a starting truncation for the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// δ: minimal distance from the essential spectrum for a point to count
    /// as Fredholm.
    pub fredholm_margin: f64,
    /// τ: singular values below `τ · σ_max` count as numerically zero.
    pub rank_rel_tol: f64,
    /// Number of uniform samples of the unit circle used for symbol curves.
    pub theta_samples: usize,
    /// Starting truncation size for the nullity/defect oracle.
    pub oracle_n: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            fredholm_margin: 1e-6,
            rank_rel_tol: 1e-8,
            theta_samples: 4096,
            oracle_n: 64,
        }
    }
}

/// Default sample count for essential norms of Toeplitz symbols.
pub const ESSENTIAL_NORM_SAMPLES: usize = 2048;
