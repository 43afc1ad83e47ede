use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid event at index {index}: {reason}")]
    InvalidEvent { index: usize, reason: String },

    #[error("not an EVT1 file")]
    NotEvt1,
    #[error("not an EVZF file")]
    NotEvzf,
    #[error("unexpected end of file")]
    UnexpectedEof,
    #[error("corrupt record at index {0}")]
    CorruptRecord(usize),
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("dimension too large: {0} exceeds 65535")]
    DimensionTooLarge(usize),
    #[error("truncated tensor")]
    TruncatedTensor,
    #[error("duplicate entry: {0}")]
    DuplicateEntry(String),
    #[error("class out of range: {class} not in [0, {num_classes})")]
    ClassOutOfRange { class: usize, num_classes: usize },

    #[error("zero-duration stream")]
    ZeroDuration,
    #[error("non-uniform scale unsupported: {src_w}x{src_h} -> {dst_w}x{dst_h}")]
    NonUniformScale {
        src_w: usize,
        src_h: usize,
        dst_w: usize,
        dst_h: usize,
    },
    #[error("geometry mismatch: stream is {stream_w}x{stream_h}, target is {target_w}x{target_h}")]
    GeometryMismatch {
        stream_w: usize,
        stream_h: usize,
        target_w: usize,
        target_h: usize,
    },

    #[error("no donor available: dataset size {0} < 2")]
    NoDonor(usize),
    #[error("coverage out of range: {0}")]
    CoverageOutOfRange(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("donor count mismatch: mixnum is {expected}, got {got} donors")]
    DonorCountMismatch { expected: usize, got: usize },
    #[error("ratio out of range: {0}")]
    RatioOutOfRange(f64),
    #[error("invalid label: {0}")]
    InvalidLabel(String),

    #[error("shape escapes frame at bin {0}")]
    ShapeEscapesFrame(usize),

    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("unknown strategy: {0}")]
    UnknownStrategy(String),
    #[error("no label track in {0}")]
    NoLabelTrack(PathBuf),
    #[error("all {0} samples failed")]
    AllSamplesFailed(usize),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
