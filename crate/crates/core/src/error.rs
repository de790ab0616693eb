use thiserror::Error;

/// Errors raised by the sequence, space, operator and orbit layers.
///
/// Mathematical outcomes ("the criterion fails") are never errors; they are
/// reported through [`crate::report::CriterionReport`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("denominator vanishes at index {0} and no override is given")]
    ZeroDenominator(usize),
    #[error("negative index {0}")]
    IndexNegative(i64),
    #[error("index {index} exceeds the cap {cap}")]
    IndexTooLarge { index: usize, cap: usize },
    #[error("polynomial degree {0} exceeds the cap of 8")]
    DegreeTooLarge(usize),
    #[error("sequence `{name}` vanishes at index {index}")]
    ZeroTerm { name: &'static str, index: usize },
    #[error("weight w_{0} is zero")]
    ZeroWeight(usize),
    #[error("degenerate space: limsup (|a_n|+|b_n|)^(1/n) is infinite")]
    DegenerateSpace,
    #[error("tail cannot be certified: {0}")]
    TailNotCertifiable(String),
    #[error("functional is not in the dual space: {0}")]
    NotInDual(String),
    #[error("polynomials are not contained in the space: {0}")]
    PolynomialNotInSpace(String),
    #[error("{0} is not a root of unity of the requested order")]
    NotRootOfUnity(String),
    #[error("unsupported exponent: {0}")]
    UnsupportedExponent(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("certified bound violated: {0}")]
    CertMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
