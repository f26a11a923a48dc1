use crate::exactnum::{ParseRationalError, Rational};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The closed form is only validated against the pair-counting oracle for `s < N/2`.
    #[error(
        "s = {s} outside validated closed-form domain (requires s < N/2 for N = {n}); use the sorted or naive engine"
    )]
    OutsideValidatedDomain { n: u64, s: Rational },

    #[error(transparent)]
    Parse(#[from] ParseRationalError),
}
