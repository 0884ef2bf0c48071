use thiserror::Error;

/// Errors raised by the matching algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("pattern of length {m} does not fit in text of length {n}")]
    PatternTooLong { n: usize, m: usize },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("{0} does not accept wild cards")]
    WildcardUnsupported(&'static str),

    #[error("predicted correlation magnitude {predicted} exceeds the exact range {limit}")]
    Precision { predicted: u128, limit: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_lengths(n: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Empty("pattern"));
    }
    if m > n {
        return Err(Error::PatternTooLong { n, m });
    }
    Ok(())
}
