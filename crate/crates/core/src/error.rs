use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} out of domain: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("length mismatch for {what}: expected {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("sample rate mismatch: channel {channel} Hz, frame {frame} Hz")]
    SampleRateMismatch { channel: f64, frame: f64 },

    #[error("{0} is empty")]
    Empty(&'static str),

    #[error("zero-forcing infeasible for paths {paths:?}: {reason}")]
    ZeroForcing { paths: Vec<usize>, reason: String },

    #[error("could not place {num_paths} paths with angular separation {min_separation} after {attempts} draws; use fewer paths or more antennas")]
    AngleSeparation {
        num_paths: usize,
        min_separation: f64,
        attempts: usize,
    },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("zero-power signal")]
    ZeroPower,

    #[error("zero channel gain")]
    ZeroGain,

    #[error("dense oracle too large: {size} > {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        what,
        detail: detail.into(),
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}
