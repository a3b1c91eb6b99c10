use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{q} and {k} are not coprime")]
    NotCoprime { q: u64, k: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is not irreducible")]
    NotIrreducible,
    #[error("polynomial is reducible")]
    Reducible,
    #[error("modulus must be monic of degree {expected}")]
    BadModulus { expected: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero element has no multiplicative order")]
    ZeroElement,
    #[error("{d} does not divide {m}")]
    NotADivisor { d: usize, m: usize },
    #[error("no element of order {k} in a field with {field_size} elements")]
    OrderUnavailable { k: u64, field_size: String },
    #[error("characteristic {p} divides {k}")]
    CharacteristicDividesK { p: u64, k: u64 },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("operands live over different coefficient fields")]
    MixedContext,
    #[error("({q}, {n}) is not regular: gcd(ord_{rad}({q}) = {ord}, {n}) = {gcd}")]
    NotRegular { q: u64, n: u64, rad: u64, ord: u64, gcd: u64 },
    #[error("n = {0} is odd")]
    WrongParity(u64),
    #[error("{q} is not a prime power")]
    NotPrimePower { q: u64 },
    #[error("k = {k} is not an exceptional divisor")]
    NotExceptional { k: u64 },
    #[error("element does not lie in the requested module")]
    NotInModule,
    #[error("enumeration of {size} elements exceeds the budget of {budget}")]
    TooLarge { size: String, budget: u64 },
    #[error("exhausted the search space without finding a primitive completely normal element")]
    ExhaustedNoneFound,
    #[error("pair ({q}, {n}) is not supported by this construction")]
    UnsupportedPair { q: u64, n: u64 },
    #[error("could not establish omega for {q}^{n} - 1 within the factoring budget")]
    Unfactored { q: u64, n: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("certificate check failed: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
