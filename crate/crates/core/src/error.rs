use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A density or other argument lies outside the domain where a quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The sound speed squared `p'(rho)` is not positive.
    #[error("hyperbolicity lost at rho = {rho}: p'(rho) = {dp}")]
    Hyperbolicity { rho: f64, dp: f64 },

    /// The pressure law does not support the requested operation.
    #[error("unsupported pressure law: {0}")]
    UnsupportedPressure(String),

    /// A wave curve was requested on the wrong side of its base state.
    #[error("wrong wave branch: {0}")]
    WrongBranch(String),

    /// Root finding or iteration failed to converge.
    #[error("solver failure: {0}")]
    Solver(String),

    /// The configuration is outside what the implementation handles (e.g. vacuum).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Exact arithmetic hit a non-invertible element or an irrational square root.
    #[error("exact arithmetic: {0}")]
    Arithmetic(String),

    /// Malformed input data.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Geometry search in state space failed.
    #[error("geometry: {0}")]
    Geometry(String),

    /// Requested resolution is too coarse for the requested accuracy.
    #[error("resolution: {0}")]
    Resolution(String),

    /// Margins required by a construction are not met.
    #[error("margin: {0}")]
    Margin(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Invalid(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
