use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. Variants map one-to-one onto the failure
/// modes of the individual operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed PPM header: {0}")]
    MalformedHeader(String),
    #[error("truncated PPM payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("unsupported PPM maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("grayscale images cannot be written as P6")]
    GrayscaleUnsupported,

    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("operation requires {expected} channels, image has {found}")]
    ChannelMismatch { expected: usize, found: usize },
    #[error("kernel side {0} is even")]
    EvenKernel(usize),
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("image {width}x{height} is too small, need at least {min}x{min}")]
    ImageTooSmall { width: usize, height: usize, min: usize },

    #[error("dataset is empty")]
    EmptyDataset,
    #[error("batch is empty")]
    EmptyBatch,

    #[error("sharpen strength must be non-negative, got {0}")]
    NegativeStrength(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("plan step {index} ({step}) failed: {source}")]
    Step {
        index: usize,
        step: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("output dimension is not integral: {0}")]
    NonIntegralOutputDim(String),
    #[error("max pooling needs even spatial dims, got {height}x{width}")]
    OddSpatialDim { height: usize, width: usize },
    #[error("unsupported head depth {0}")]
    UnsupportedDepth(usize),
    #[error("image {width}x{height} is not divisible by {divisor} as the extractor requires")]
    IndivisibleDims { width: usize, height: usize, divisor: usize },
    #[error("manifest does not match extractor: {0}")]
    ShapeMismatchInManifest(String),
    #[error("corrupt weight blob: {0}")]
    CorruptBlob(String),
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("malformed weight manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("weight manifest {0} not found")]
    MissingWeights(PathBuf),

    #[error("invalid config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("no input images in {0}")]
    NoInputs(PathBuf),
    #[error("{found} files cannot fill {buckets} buckets")]
    TooFewFiles { found: usize, buckets: usize },
    #[error("crop fraction {fraction} of {width}x{height} is smaller than one pixel")]
    CropTooSmall { width: usize, height: usize, fraction: f64 },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

impl Error {
    /// Process exit status for the command-line front end: 2 for empty or
    /// unparsable input, 3 for unusable weights, 4 for bad parameters and
    /// 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoInputs(_)
            | Error::TooFewFiles { .. }
            | Error::Csv { .. }
            | Error::Config { .. }
            | Error::EmptyDataset
            | Error::EmptyBatch => 2,
            Error::MissingWeights(_) | Error::Manifest(_) | Error::ShapeMismatchInManifest(_) | Error::CorruptBlob(_) => 3,
            Error::InvalidParameter(_)
            | Error::NegativeStrength(_)
            | Error::NonPositiveSigma(_)
            | Error::EvenKernel(_)
            | Error::UnsupportedDepth(_)
            | Error::CropTooSmall { .. } => 4,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Non-fatal conditions. The affected operation still produces output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum Warning {
    /// Mean intensity too close to zero for a color-cast ratio to be defined.
    NearBlackImage,
    /// Gray-world gain undefined for this channel; it was left unscaled.
    ZeroChannelMean { channel: usize },
}
