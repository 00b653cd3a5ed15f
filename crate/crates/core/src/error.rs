use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the ceiling {ceiling}")]
    FieldTooLarge { p: u64, k: u32, ceiling: u64 },
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("no irreducible polynomial of degree {k} over F_{p} was found")]
    NoIrreducible { p: u32, k: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element {value} is outside the field of order {q}")]
    ElementOutOfRange { value: u64, q: u32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("objects live over different fields or ambient spaces")]
    SpaceMismatch,
    #[error("operation requires a nonempty set")]
    EmptySet,
    #[error("ambient space F_{q}^{n} is too large for keyed enumeration")]
    SpaceTooLarge { q: u32, n: usize },

    #[error("field cardinality larger than 2 required (got q = {0})")]
    FieldTooSmall(u32),
    #[error("m >= {min} required (got m = {m})")]
    ParameterTooSmall { min: usize, m: usize },
    #[error("construction invariant violated: {0}")]
    Construction(String),

    #[error("set is not projective")]
    NotProjective,
    #[error("input is not a tiling: {0}")]
    NotATiling(String),
    #[error("enumeration of q^N = {q}^{n} vectors (N = {n}) exceeds the ceiling {ceiling}; raise the ceiling or use a smaller instance")]
    CeilingExceeded { q: u32, n: usize, ceiling: u64 },

    #[error("point sets are not disjoint")]
    NotDisjoint,
    #[error("zero vector is not a projective point")]
    ZeroPoint,
    #[error("input is not a factorization")]
    NotAFactorization,
    #[error("point is not a period of the first tile")]
    NotAPeriod,
    #[error("counting identity violated: {lhs} != {rhs}")]
    CountingIdentity { lhs: u128, rhs: u128 },
    #[error("geometry has {points} points, above the search ceiling {ceiling}; pass an explicit override to run it")]
    SearchCeiling { points: u128, ceiling: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
