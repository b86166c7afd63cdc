use thiserror::Error;

/// Errors raised while decoding a binary PPM (P6) stream.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PpmError {
    #[error("not a binary PPM: expected magic `P6`")]
    BadMagic,
    #[error("unsupported maxval {0}, only 255 is accepted")]
    UnsupportedMaxval(u64),
    #[error("image dimensions must be positive, got {width}x{height}")]
    InvalidDimensions { width: u64, height: u64 },
    #[error("malformed header: {0}")]
    MalformedHeader(&'static str),
    #[error("truncated payload: expected {expected} bytes, found {actual}")]
    TruncatedPayload { expected: usize, actual: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("fuzzifier must be greater than 1, got {0}")]
    InvalidFuzzifier(f64),
    #[error("cluster count must be at least 1")]
    InvalidClusterCount,
    #[error("requested {requested} clusters but the image has only {distinct} distinct colors")]
    TooManyClusters { requested: usize, distinct: usize },
    #[error("invalid swarm configuration: {0}")]
    InvalidSwarmConfig(String),
    #[error("cluster {0} received zero total membership")]
    DeadCluster(usize),
    #[error("clustering degenerated: dead clusters recurred {0} consecutive times")]
    DegenerateClustering(usize),
    #[error("cannot normalize a pair of zero objective values")]
    UndefinedNormalization,
    #[error(transparent)]
    Ppm(#[from] PpmError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
