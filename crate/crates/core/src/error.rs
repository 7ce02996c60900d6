use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sequence: {0}")]
    Empty(&'static str),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("frame rates differ ({0} vs {1} frames/s); resample before comparing")]
    FrameRateMismatch(f64, f64),

    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    #[error("joint `{joint}` is missing{}", .frame.map(|f| format!(" at frame {f}")).unwrap_or_default())]
    MissingJoint { joint: String, frame: Option<usize> },

    #[error("invalid segment bounds [{start}, {end}] for {frames} frames")]
    InvalidBounds {
        start: usize,
        end: usize,
        frames: usize,
    },

    #[error("no heel-off found on `{0}`; supply manual segment bounds")]
    NoSegmentStart(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("{left} vs {right}: {source}")]
    PairEvaluation {
        left: String,
        right: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the computation itself rather than of its inputs.
    pub fn is_domain(&self) -> bool {
        match self {
            Error::DegenerateSignal(_) => true,
            Error::PairEvaluation { source, .. } => source.is_domain(),
            _ => false,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl std::fmt::Display) -> Self {
        Error::Format {
            path: path.into(),
            message: message.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
