use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping used by the command line to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Io,
}

impl ErrorClass {
    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::Config => "config",
            ErrorClass::Data => "data",
            ErrorClass::Io => "io",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Config => 2,
            ErrorClass::Data => 3,
            ErrorClass::Io => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{context}: malformed JSON at byte {offset}: {message}")]
    Json {
        context: String,
        offset: usize,
        message: String,
    },

    #[error("annotation {annotation_id}: {message}")]
    Referential { annotation_id: u64, message: String },

    #[error("invalid annotation data: {0}")]
    InvalidAnnotation(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("mask is empty")]
    EmptyMask,

    #[error("placement out of bounds: {0}")]
    Bounds(String),

    #[error("template set is empty")]
    EmptyTemplates,

    #[error("response text is empty")]
    EmptyResponse,

    #[error("gold listing is empty")]
    EmptyGold,

    #[error("no scores to aggregate")]
    EmptyScores,

    #[error("listing record invalid: {0}")]
    Listing(String),

    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("no replay fixture for request {hash}")]
    ReplayMiss { hash: String },

    #[error("image {image_id} has no gold listing")]
    MissingGold { image_id: u64 },

    #[error("{0}")]
    Data(String),

    #[error("recipe error: {0}")]
    Recipe(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image codec error: {0}")]
    Image(#[from] image::ImageError),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) | Error::Recipe(_) => ErrorClass::Config,
            Error::Io { .. } | Error::Transport { .. } => ErrorClass::Io,
            _ => ErrorClass::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps a serde_json error, translating its line/column into a byte offset of `input`.
    pub(crate) fn json(context: impl Into<String>, input: &[u8], err: &serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            offset: byte_offset(input, err.line(), err.column()),
            message: err.to_string(),
        }
    }
}

fn byte_offset(input: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut current = 1;
    let mut line_start = 0;
    for (i, b) in input.iter().enumerate() {
        if current == line {
            break;
        }
        if *b == b'\n' {
            current += 1;
            line_start = i + 1;
        }
    }
    (line_start + column.saturating_sub(1)).min(input.len())
}
