use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// The variants fall into four families (parse, validation, verification,
/// resource bound) which the command-line front end maps to exit codes via
/// [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} is too large for machine-word residue arithmetic")]
    PrimeTooLarge(u64),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u64),
    #[error("mixed characteristics: {0} and {1}")]
    CharMismatch(u64, u64),
    #[error("{j}! has no inverse modulo {p}")]
    FactorialOutOfRange { j: u64, p: u64 },
    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("not a valid polynomial automorphism datum (non-scalar Jacobian)")]
    NonScalarJacobian,
    #[error("images do not define an automorphism (level-{level} residue not a p-th-power polynomial)")]
    NotPthPower { level: usize },
    #[error("relation violated: {0}")]
    RelationViolation(String),
    #[error("invalid descent: {0}")]
    InvalidDescent(String),
    #[error("derivation not locally nilpotent on input")]
    NotLocallyNilpotent,
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("not continuous: {0}")]
    NotContinuous(String),
    #[error("algebra is not central simple")]
    NotCentralSimple,
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("restriction to centre is not an automorphism datum: {0}")]
    CentreNotAutomorphism(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("supplied images are not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("recursion depth bound {0} exceeded")]
    DepthExceeded(usize),
    #[error("insufficient divided-power images: level {level} required")]
    InsufficientLevels { level: u32 },
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code: 1 parse, 2 validation, 3 verification, 4 resource bound.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Parse { .. } | Io(_) => 1,
            NotAutomorphism(_) | VerificationFailed(_) | InvariantViolation(_) => 3,
            DepthExceeded(_) | InsufficientLevels { .. } | ResourceBound(_) | NotLocallyNilpotent => 4,
            _ => 2,
        }
    }

    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}
