use thiserror::Error;

/// Errors raised by the library. `Syntax` is reserved for input that could not
/// be read at all (parser and format errors); everything else is a domain
/// error on well-formed input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("empty system: no polynomials found")]
    EmptySystem,

    #[error("matrix is rank deficient: rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("zero coordinate raised to a negative power")]
    ZeroToNegativePower,

    #[error("non-integer exponent {0} produced by monomial transform")]
    FractionalExponent(String),

    #[error("equation {index} is not binomial: it has {terms} terms")]
    NotBinomial { index: usize, terms: usize },

    #[error("equation {index} has a single term; no solutions with all coordinates nonzero")]
    SingleTerm { index: usize },

    #[error("enumeration size {size} exceeds cap {cap}")]
    EnumerationCap { size: u128, cap: u64 },

    #[error("cannot extract exact {degree}-th root of {value}")]
    RootExtraction { degree: u64, value: String },

    #[error("degenerate random draw persisted after {0} retries")]
    DegenerateDraw(u32),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True for errors that should map to the usage/syntax exit code of the
    /// command-line tool rather than the domain-error code.
    pub fn is_syntax(&self) -> bool {
        matches!(self, Error::Syntax { .. } | Error::EmptySystem)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
