use std::path::PathBuf;

use num_bigint::BigInt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid degree {0}")]
    InvalidDegree(i64),

    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },

    #[error("variable count mismatch: {0} vs {1}")]
    Arity(usize, usize),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("invalid prime {0}")]
    InvalidPrime(u64),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("polynomial has no terms")]
    EmptyPolynomial,

    #[error("monomial tree stack underflow: every level is already substituted")]
    StackUnderflow,

    #[error("{what} out of range: {value} (allowed {allowed})")]
    Range {
        what: &'static str,
        value: String,
        allowed: String,
    },

    #[error("invalid state: {0}")]
    State(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("bad magic bytes {found:?}, expected {expected:?}")]
    BadMagic { found: [u8; 4], expected: [u8; 4] },

    #[error("truncated data: {0}")]
    Truncated(String),

    #[error("exponent {exponent} of variable {var} exceeds declared maximum {max}")]
    ExponentOutOfRange { var: usize, exponent: u8, max: u8 },

    #[error("zero coefficient stored in term {0}")]
    ZeroCoefficient(usize),

    #[error("coefficient {0} does not fit the 64-bit file encoding")]
    CoefficientOverflow(BigInt),

    #[error("corrupt checkpoint {path}: {reason}")]
    CorruptCheckpoint { path: PathBuf, reason: String },

    #[error("form is singular (discriminant 0)")]
    SingularInput,

    #[error("prime {0} divides the discriminant")]
    BadReduction(u64),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("point count {count} at p={p} violates the Weil bound (counting bug)")]
    WeilBound { p: u64, count: u64 },

    #[error(
        "degree {degree} needs an estimated {needed_mib} MiB but the budget is {budget_mib} MiB; \
         raise TQF_MEMORY_BUDGET_MIB or run on a larger machine"
    )]
    MemoryBudget {
        degree: u32,
        needed_mib: u64,
        budget_mib: u64,
    },

    #[error("monomial tree cache {path} not found; build it with `tqf tree build --degree {degree}`")]
    TreeCacheMissing { path: PathBuf, degree: u32 },

    #[error("interrupted")]
    Interrupted,

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn range(what: &'static str, value: impl ToString, allowed: impl ToString) -> Self {
        Error::Range {
            what,
            value: value.to_string(),
            allowed: allowed.to_string(),
        }
    }
}

pub(crate) trait IoContext<T> {
    fn ctx(self, context: impl FnOnce() -> String) -> Result<T>;
}

impl<T> IoContext<T> for std::io::Result<T> {
    fn ctx(self, context: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|source| Error::Io {
            context: context(),
            source,
        })
    }
}
