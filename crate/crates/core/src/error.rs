use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sketch shape: rows={rows}, buckets={buckets} (need rows >= 1, buckets >= 2)")]
    InvalidShape { rows: usize, buckets: usize },

    #[error("edge weight must be finite and non-negative, got {0}")]
    InvalidWeight(f64),

    #[error("decay factor must lie in (0, 1], got {0}")]
    InvalidDecay(f64),

    #[error("density is undefined for an empty row or column set")]
    EmptyIndexSet,

    #[error("likelihood is undefined for an empty cell set")]
    EmptyCellSet,

    #[error("index {index} out of range for {buckets} buckets")]
    IndexOutOfRange { index: usize, buckets: usize },

    #[error("timestamp went backwards: {got} after {previous}")]
    StreamOrder { previous: i64, got: i64 },

    #[error("{}:{line}: timestamp went backwards: {got} after {previous}", path.display())]
    StreamOrderAt {
        path: PathBuf,
        line: usize,
        previous: i64,
        got: i64,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unknown input format `{0}` (expected csv-uvt or csv-uvwt)")]
    UnknownFormat(String),

    #[error("label count {labels} does not match item count {items}")]
    Alignment { items: usize, labels: usize },

    #[error("AUC needs both positive and negative labels")]
    DegenerateLabels,

    #[error("score {0} is not finite")]
    NonFiniteScore(f64),

    #[error("matrix of size {size} exceeds the exhaustive search limit of {limit}")]
    MatrixTooLarge { size: usize, limit: usize },

    #[error("K={k} out of range [1, {max}]")]
    KOutOfRange { k: usize, max: usize },

    #[error("window length must be at least one tick")]
    InvalidWindow,

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("invalid synthetic stream spec: {0}")]
    InvalidSynthSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
