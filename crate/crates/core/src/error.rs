use thiserror::Error;

/// Errors shared by every module in the crate.
///
/// Domain errors reject inputs outside an operation's contract; resource
/// errors reject inputs that exceed one of the explicit size caps; internal
/// errors indicate a consistency check tripped (these should never fire).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeroes,

    #[error("modulus {modulus} is out of range (need modulus >= 2)")]
    ModulusTooSmall { modulus: u64 },

    #[error("Jacobi symbol modulus {n} must be odd and >= 3")]
    JacobiModulus { n: u64 },

    #[error("cannot factorize {n} (need n >= 2)")]
    FactorizeRange { n: u64 },

    #[error("two-adic split of 0 is undefined")]
    ZeroSplit,

    #[error("{y} is not a unit modulo {n} (gcd = {gcd})")]
    NotAUnit { y: u64, n: u64, gcd: u64 },

    #[error("exponent bound is not a multiple of the order of {y} modulo {n}")]
    BadExponentBound { y: u64, n: u64 },

    #[error("{value} is not an odd prime")]
    NotOddPrime { value: u64 },

    #[error("the two primes must be distinct (both were {value})")]
    EqualPrimes { value: u64 },

    #[error("valuations must be >= 1 (got m1 = {m1}, m2 = {m2})")]
    ZeroValuation { m1: u32, m2: u32 },

    #[error("valuations must satisfy m1 <= m2 (got m1 = {m1}, m2 = {m2})")]
    NonCanonicalValuations { m1: u32, m2: u32 },

    #[error("{n} is not an odd composite >= 15")]
    NotOddComposite { n: u64 },

    #[error("{n} is prime; nothing to factor")]
    PrimeInput { n: u64 },

    #[error("{n} is not a product of two distinct odd primes")]
    NotSemiprime { n: u64 },

    #[error("modulus {q} must be a power of two with q >= r^2 (r = {r})")]
    MeasurementModulus { q: u64, r: u64 },

    #[error("measurement outcome {c} must be below the modulus {q}")]
    MeasurementOutOfRange { c: u64, q: u64 },

    #[error("order oracle returned {order} for {y} mod {n}, but y^order != 1")]
    InconsistentOracle { y: u64, n: u64, order: u64 },

    #[error("{value} exceeds the {what} cap of {cap}")]
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("rational denominator must be nonzero")]
    ZeroDenominator,

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by exceeding a size cap rather than by an
    /// invalid input. The CLI maps these to a dedicated exit code.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
