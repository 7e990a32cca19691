use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("capacity exceeded: {what} needs {needed}, limit is {limit}")]
    Capacity {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("degree {d} is not of general type in dimension {n} (need d >= n+3)")]
    NotGeneralType { n: usize, d: i64 },
    #[error("need at least {need} sample points, got {got}")]
    InsufficientSamples { need: usize, got: usize },
    #[error("determinants are comparable, no relation attached")]
    Comparable,
}

pub type Result<T> = std::result::Result<T, Error>;

/// Default cap on the number of boxes a single enumeration may touch.
pub const DEFAULT_MAX_CELLS: usize = 4096;

pub(crate) fn guard(what: &'static str, needed: u128, limit: u128) -> Result<()> {
    if needed > limit {
        Err(Error::Capacity {
            what,
            needed,
            limit,
        })
    } else {
        Ok(())
    }
}
