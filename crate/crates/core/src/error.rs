use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("non-unit divisor: constant term of the divisor is zero")]
    NonUnitDivisor,
    #[error("normalization: {op} requires constant term {required}, found {found}")]
    Normalization {
        op: &'static str,
        required: &'static str,
        found: String,
    },
    #[error("{op} requires an inner series without constant term, found {found}")]
    NonzeroConstant { op: &'static str, found: String },
    #[error("revert requires a nonzero linear coefficient")]
    NotReversible,
    #[error("cannot divide by q^{shift}: coefficient of q^{index} is nonzero")]
    Valuation { shift: usize, index: usize },
    #[error("series of order {order} is too short for {op}")]
    InsufficientOrder { op: &'static str, order: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed rational {0:?}")]
    Rational(String),
    #[error("malformed document: {0}")]
    Document(String),
    #[error("unsupported format version {found}, expected {expected}")]
    Version { found: u32, expected: u32 },
}

#[derive(Debug, Error)]
pub enum SeveriError {
    #[error("profile weight mismatch: I(alpha) + I(beta) = {weight}, degree is {d}")]
    ProfileWeightMismatch { d: u32, weight: u64 },
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("degree {d} is below the ampleness threshold 5r-1 for r = {r} (use unsafe to override)")]
    Threshold { d: u32, r: usize },
    #[error("interpolation window of length {len} is too short, cogenus {delta} needs at least {needed}")]
    WindowTooShort { delta: u32, len: usize, needed: usize },
    #[error("malformed tangency profile {0:?}")]
    Profile(String),
    #[error("cache file: {0}")]
    Cache(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CobordismError {
    #[error("Noether violation: c1^2 + c2 = {0} is not divisible by 12")]
    Noether(i64),
    #[error("Riemann-Roch parity violation: L^2 + LK = {0} is odd")]
    Parity(i64),
    #[error("non-integral decomposition coefficient {0}")]
    NonIntegral(&'static str),
    #[error("invalid descriptor: {0}")]
    Descriptor(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Severi(#[from] SeveriError),
    #[error(transparent)]
    Cobordism(#[from] CobordismError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("order {requested} exceeds available order {available}")]
    Order { requested: usize, available: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
