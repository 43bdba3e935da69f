use alloc::string::String;

/// Errors raised by the library operations.
///
/// Negative screening outcomes (a failed divisibility test, a non-integral
/// transform) are not errors; they are reported as verdicts with witnesses.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("resource guard exceeded: {what} needs {needed} but the limit is {limit}")]
    Guard {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("generator matrix has rank {rank} but {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    #[error("coset graph would be a multigraph: {0}")]
    Multigraph(String),

    #[error("graph is disconnected: {reached} of {total} vertices reachable from {base}")]
    Disconnected {
        base: usize,
        reached: usize,
        total: usize,
    },

    #[error("inconsistent weight distribution: {0}")]
    InconsistentDistribution(String),

    #[error("the zero code has no minimum distance")]
    ZeroCode,

    #[error("{q} is not a power of {p}")]
    NotPowerOf { q: u64, p: u64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
