use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid length: {0}")]
    InvalidLength(String),
    #[error("cutoff {0} is outside (0, 1)")]
    InvalidCutoff(f64),
    #[error("no transient found: amplitude variance is zero everywhere")]
    NoTransientFound,
    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),
    #[error("time-frequency grid is identically zero")]
    DegenerateTf,
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("relevance entry {index} = {value} is outside [0, 1]")]
    InvalidRelevance { index: usize, value: f64 },
    #[error("within-class scatter is singular even after ridge")]
    SingularScatter,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("class of size {class_size} cannot supply {neighbors} neighbors")]
    InvalidNeighborCount { neighbors: usize, class_size: usize },
    #[error("requested {requested} items but only {available} available")]
    InvalidCount { requested: usize, available: usize },
    #[error("SVM training did not converge after {iterations} pair updates (KKT gap {gap:.3e})")]
    TrainingFailed { iterations: usize, gap: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed data: {0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }
}
