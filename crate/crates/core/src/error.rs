use thiserror::Error;

/// Errors raised by the kernel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} is not a power of the characteristic")]
    NotPrimePower(u64),
    #[error("modulus is not irreducible over the prime field")]
    ReducibleModulus,
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("elements belong to different towers")]
    TowerMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("`{0}` is not an element of the p-basis")]
    NotInPBasis(String),
    #[error("element is not a p-th power")]
    NotAPthPower,
    #[error("F_{sub} is not a subfield of F_{field}")]
    NotASubfield { field: u64, sub: u64 },
    #[error("expected a form of degree {expected}, got degree {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("towers are not consecutive Laurent layers")]
    LayerMismatch,
    #[error("polynomial is not separable")]
    NotSeparable,
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("malformed coefficient expansion: {0}")]
    MalformedExpansion(String),
    #[error("series is not regular in the last variable at this truncation")]
    NotRegular,
    #[error("series vanishes modulo the maximal ideal of the coefficient ring")]
    ZeroModMaximalIdeal,
    #[error("no regularizing substitution below the truncation order")]
    TruncationTooSmall,
    #[error("element has a unit constant term; expected an element of the maximal ideal")]
    NotInMaximalIdeal,
    #[error("derivative at the initial point is not a unit")]
    NotSimpleRoot,
    #[error("series rings differ")]
    RingMismatch,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
