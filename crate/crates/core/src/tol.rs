//! Numerical tolerances shared by every module.
//!
//! Everything that decides "is this Hermitian", "is this a projector" or
//! "are these eigenvalues degenerate" reads from here, so stress tests can
//! tighten or loosen the whole library from one place.

/// Relative Hermiticity bound: `max |M - M†| <= HERMITIAN * max |M|`.
pub const HERMITIAN: f64 = 1e-12;

/// Absolute bound on `max |U†U - I|`.
pub const UNITARY: f64 = 1e-10;

/// Absolute bound on `max |P² - P|` and on trace deviations of projectors.
pub const PROJECTOR: f64 = 1e-10;

/// Eigenpair residual bound, relative to the operator norm.
pub const EIGEN_RESIDUAL: f64 = 1e-10;

/// Eigenvalues closer than this (relative to `1 + ‖M‖`) are treated as tied
/// when ordering eigenvectors.
pub const EIGEN_TIE: f64 = 1e-12;

/// Minimum relative spectral gap below which energy labels are unstable.
pub const NEAR_DEGENERATE_GAP: f64 = 1e-6;

/// Allowed deviation of a state vector norm from one.
pub const STATE_NORM: f64 = 1e-10;

/// Noiseless probability slack: entries must lie in `[-ε, 1 + ε]`.
pub const PROBABILITY: f64 = 1e-10;

/// `1 - p_i` below this makes the complement state undefined.
pub const COMPLEMENT: f64 = 1e-9;

/// Largest allowed deviation between the closed-form and stepped propagators
/// during the start-of-run self test.
pub const CLOSED_FORM_SELF_TEST: f64 = 1e-6;
