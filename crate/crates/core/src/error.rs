use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the unit cube")]
    Domain { point: Vec<f64> },

    #[error("layer {layer} output {value} at component {component} leaves [0,1]")]
    Range { layer: usize, component: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("singular likelihood ratio at {point:?}: reference probability {eta2}")]
    Singular { point: Vec<f64>, eta2: f64 },

    #[error("capacity exceeded: need {required} members, cap is {cap}")]
    Capacity { required: String, cap: usize },

    #[error("approximation resolution cap hit: achieved sup error {achieved}, target {target}")]
    Resolution { achieved: f64, target: f64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("retry cap exceeded: {0}")]
    Retry(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
