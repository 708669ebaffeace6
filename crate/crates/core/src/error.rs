use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A caller broke a precondition (index out of range, mismatched sizes).
    #[error("contract violation: {0}")]
    Contract(String),
    /// Input data failed validation (non-Hermitian matrix, malformed clause).
    #[error("invalid input: {0}")]
    Validation(String),
    /// The request exceeds a configured size limit.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("numerical failure at t = {t}: {message}")]
    Numerical { t: f64, message: String },
    #[error("norm drift {drift:.3e} exceeds tolerance {tolerance:.1e} at step {step}")]
    Divergence { step: u64, drift: f64, tolerance: f64 },
    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    /// A failure while scanning an interpolation path, tagged with `s`.
    #[error("at s = {s}: {source}")]
    AtParameter { s: f64, source: Box<Error> },
    #[error("instance generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
}

macro_rules! contract {
    ($($arg:tt)*) => { $crate::Error::Contract(alloc::format!($($arg)*)) };
}
macro_rules! invalid {
    ($($arg:tt)*) => { $crate::Error::Validation(alloc::format!($($arg)*)) };
}
pub(crate) use {contract, invalid};
