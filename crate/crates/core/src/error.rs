use thiserror::Error;

/// Errors raised by field, geometry, code and counting operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u32 },
    #[error("no default modulus for F_{p}^{ext_degree}; supply one explicitly")]
    UnsupportedSize { p: u32, ext_degree: u32 },
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("F_{p}^{k} is not a subfield of F_{p}^{ext_degree}")]
    InvalidSubfield { p: u32, k: u32, ext_degree: u32 },
    #[error("the zero polynomial has no finite root set")]
    ZeroPolynomial,
    #[error("{0} is not a prime power >= 2")]
    InvalidEll(u64),
    #[error("defining points do not span the requested flat")]
    DegenerateSpan,
    #[error("({x}, {y}) does not satisfy x^l + x = y^(l+1) with a rational fibre")]
    NotOnSurface { x: String, y: String },
    #[error("degree {alpha} outside 1..={ell}")]
    DegreeOutOfRange { alpha: u64, ell: u64 },
    #[error("work budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("three coplanar full secants need l >= 3 (got l = {ell})")]
    NeedEllGe3 { ell: u64 },
    #[error("y-value lies in F_(l^2); its vertical secant is not full")]
    NotGeneric,
    #[error("evaluation points are not distinct (index {0})")]
    DuplicatePoints(usize),
    #[error("invalid monomial basis: {0}")]
    InvalidBasis(String),
    #[error("minimum distance classification needs m >= 2 (got {0})")]
    MTooSmall(u64),
    #[error("vector length {got} does not match code length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("support of size {size} exceeds the inclusion-exclusion cap {cap}")]
    SupportTooLarge { size: usize, cap: usize },
    #[error("invalid support: {0}")]
    InvalidSupport(String),
    #[error("count does not fit in 128 bits")]
    CountOverflow,
}

pub type Result<T> = std::result::Result<T, Error>;
