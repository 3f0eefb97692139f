use alloc::string::String;

/// Errors raised by the numerical core.
///
/// The variants line up with the failure classes the CLI maps to exit codes:
/// bad arguments, unavailable coefficients, unaffordable resources, and data
/// too degenerate to fit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A coefficient was requested beyond what the source can provide.
    #[error("index {index} out of range (coefficients available up to {available})")]
    Range { index: u64, available: u64 },

    /// The requested computation needs more terms or memory than available.
    #[error("resource limit: {what} (required N = {required})")]
    Resource { what: String, required: u64 },

    /// Samples are too coarse for the requested scales.
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// The exponent hypothesis is missing or outside its admissible window.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("non-finite value: {0}")]
    Numeric(String),

    /// The requested table entry has no defined value.
    #[error("not available: {0}")]
    NotAvailable(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! arg_err {
    ($($t:tt)*) => { $crate::error::Error::Argument(alloc::format!($($t)*)) };
}
pub(crate) use arg_err;
