use num_bigint::BigUint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0} is a perfect square, so its square root is rational")]
    PerfectSquare(BigUint),
    #[error("surd denominator must be nonzero")]
    ZeroDenominator,
    #[error("arguments must be positive")]
    ZeroArgument,
    #[error("expansion did not become periodic within {0} steps")]
    StepLimit(usize),
    #[error("lemma precondition: {0}")]
    LemmaPrecondition(String),
    #[error("not a pure square root: expansion has a preperiod")]
    NotPureSquareRoot,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("r must be odd, got {0}")]
    RNotOdd(u64),
    #[error("no odd prime factor of x_{index} found with trial division up to {limit}")]
    NoPrimeP { index: u64, limit: u64 },
    #[error("no admissible prime q = {residue} (mod {modulus}) below {limit}")]
    NoPrimeQ {
        residue: u64,
        modulus: u64,
        limit: u64,
    },
    #[error("{0} exceeds the deterministic primality limit")]
    PrimalityLimit(u64),
    #[error("solution index {index} exceeds the limit {limit}")]
    IndexLimit { index: u128, limit: u64 },
    #[error("falsified: {0}")]
    Falsified(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable reason code.
    pub fn reason_code(&self) -> &'static str {
        match self {
            Error::PerfectSquare(_) => "perfect-square",
            Error::ZeroDenominator => "zero-denominator",
            Error::ZeroArgument => "zero-argument",
            Error::StepLimit(_) => "step-limit",
            Error::LemmaPrecondition(_) => "lemma-precondition",
            Error::NotPureSquareRoot => "not-pure-square-root",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::RNotOdd(_) => "r-not-odd",
            Error::NoPrimeP { .. } => "no-prime-p",
            Error::NoPrimeQ { .. } => "no-prime-q",
            Error::PrimalityLimit(_) => "primality-limit",
            Error::IndexLimit { .. } => "index-limit",
            Error::Falsified(_) => "falsified",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// Process exit code: 1 falsification, 2 usage, 3 resource limit.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Falsified(_) => 1,
            Error::StepLimit(_)
            | Error::NoPrimeP { .. }
            | Error::NoPrimeQ { .. }
            | Error::PrimalityLimit(_)
            | Error::IndexLimit { .. }
            | Error::Io(_)
            | Error::Json(_) => 3,
            _ => 2,
        }
    }
}
