use thiserror::Error;

/// Errors raised by the symbol engine and the number-field oracle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base field size {0} is not a prime power")]
    InvalidBase(u64),

    #[error("modulus {m} is divisible by the characteristic {p}")]
    NonCoprimeModulus { m: u64, p: u64 },

    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(u64),

    #[error("invalid uniformizer name {0:?}")]
    InvalidName(String),

    #[error("expected {expected} uniformizer exponents, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("operands live over different towers")]
    TowerMismatch,

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("tower (q={q}, m={m}) does not contain the m-th roots of unity; only descent bookkeeping is available")]
    NotFullCalculus { q: u128, m: u64 },

    #[error("tower was not obtained by a residue-field enlargement")]
    NotDescendable,

    #[error("invalid extension degree {degree}: {reason}")]
    InvalidDegree { degree: u64, reason: &'static str },

    #[error("radicand of an unramified Kummer step must be a base-field unit")]
    NonUnitRadicand,

    #[error("class is not liftable: coefficient {coeff} is not divisible by {divisor}")]
    NotLiftable { coeff: u64, divisor: u64 },

    #[error("residue can only be taken at the outermost uniformizer (index {outermost}), got {requested}")]
    InnerUniformizer { requested: usize, outermost: usize },

    #[error("operation needs a tower of depth at least {0}")]
    DepthTooSmall(usize),

    #[error("class has degree {got}, top degree is {top}")]
    NotTopDegree { got: usize, top: usize },

    #[error("modulus {0} is prime")]
    NotComposite(u64),

    #[error("classes have mixed degrees")]
    MixedDegrees,

    #[error("empty input")]
    EmptyInput,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("identity failure at step {step}: {detail}")]
    IdentityFailure { step: usize, detail: String },

    #[error("gcd({d}, {l}) != 1")]
    GcdFailure { d: u64, l: u64 },

    #[error("Hilbert symbol of zero")]
    ZeroInput,

    #[error("modulus {m} does not divide q - 1 = {order}")]
    ModulusMismatch { m: u64, order: u64 },

    #[error("ramification set {0:?} has odd cardinality")]
    ReciprocityViolation(Vec<String>),

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("unknown generator {name:?} at column {column}")]
    UnknownGenerator { name: String, column: usize },

    #[error("arithmetic overflow")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
