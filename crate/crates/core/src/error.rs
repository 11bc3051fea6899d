//! Crate-wide error type.

/// Errors reported by the toolkit.
///
/// Variants that correspond to a violated hypothesis of one of the implemented
/// estimates (rather than a malformed input) answer `true` from
/// [`Error::is_hypothesis_violation`]; the CLI maps those to a dedicated exit
/// code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("modulus exponent must satisfy n >= 1")]
    ZeroExponent,
    #[error("p^n does not fit in 64 bits (p = {p}, n = {n})")]
    ModulusOverflow { p: u64, n: u32 },
    #[error("{value} is not a unit modulo {q}: divisible by p = {p}")]
    NotAUnit { value: u64, q: u64, p: u64 },
    #[error("residue belongs to a different modulus (expected q = {expected}, got q = {got})")]
    ModulusMismatch { expected: u64, got: u64 },
    #[error("q = {q} exceeds the table-backed evaluation limit {limit}")]
    DeskScaleExceeded { q: u64, limit: u64 },
    #[error("rational time must satisfy 0 <= num <= den with den >= 1 (got {num}/{den})")]
    InvalidTime { num: u64, den: u64 },
    #[error("time {0} lies outside [0, 1]")]
    TimeOutOfRange(f64),
    #[error("knot index {j} outside 1..={phi}")]
    IndexOutOfRange { j: u64, phi: u64 },
    #[error("evaluation undefined at t = 0: the blocks are parametrized on half-open intervals")]
    UndefinedAtZero,
    #[error("interval endpoints must satisfy s < t")]
    IntervalOrder,
    #[error("prefix index {0} is not coprime to p or lies outside 1..q")]
    PrefixNotCoprime(u64),
    #[error("moment order must be a positive even integer (got {0})")]
    InvalidMomentOrder(u32),
    #[error("series truncation must equal (q - 1)/2 = {expected} (got {got})")]
    TruncationMismatch { expected: u64, got: u64 },
    #[error("empty time grid")]
    EmptyTimeGrid,
    #[error("closed-form reference evaluation requires n >= 2 (got n = {0})")]
    ClosedFormRequiresPower(u32),
    #[error("prefactor-4 short-sum bound requires n >= 31 (got n = {0})")]
    FactorFourRequiresN31(u32),
    #[error("admissible delta window is empty: the corollary requires n >= 31 (got n = {0})")]
    EmptyDeltaWindow(u32),
    #[error("moment-exponent hypotheses unmet: {0}")]
    BetaHypothesis(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error reports a violated hypothesis of an implemented
    /// estimate (the corollaries requiring n >= 31, the exponent chain, ...).
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(
            self,
            Error::FactorFourRequiresN31(_) | Error::EmptyDeltaWindow(_) | Error::BetaHypothesis(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
