use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Numeric failures carry enough context to diagnose which evaluation broke
/// (the radius or tolerance involved), since most call sites sit deep inside
/// grid sweeps.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain violation: {what} (r = {r}, valid range [{lo}, {hi}))")]
    Domain { what: &'static str, r: f64, lo: f64, hi: f64 },

    #[error("quadrature did not converge on [{a}, {b}]: achieved error {achieved:.3e} > requested {requested:.3e}")]
    QuadratureNonConvergent { a: f64, b: f64, achieved: f64, requested: f64 },

    #[error("limit tail did not converge: {what} (estimated error {est_error:.3e})")]
    NonConvergentTail { what: String, est_error: f64 },

    #[error("invalid warping profile: {0}")]
    InvalidProfile(String),

    #[error("invalid bounding function: {0}")]
    InvalidBounding(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("point is not on the ambient model surface (constraint residual {residual:.3e})")]
    OffModel { residual: f64 },

    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),

    #[error("spec parse error: {0}")]
    Spec(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
