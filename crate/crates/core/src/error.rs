use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration fault at t = {t} s: non-finite derivative")]
    IntegrationFault { t: f64 },

    #[error("estimator diverged: {0}")]
    EstimatorDivergence(String),

    #[error("innovation covariance is numerically singular")]
    NumericallySingular,

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("{what} out of range: {value} (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("foot target outside leg workspace: radius {radius} m not in [{min}, {max}]")]
    WorkspaceViolation { radius: f64, min: f64, max: f64 },

    #[error("joint `{joint}` at {angle} rad breaches limit [{min}, {max}]")]
    JointLimit {
        joint: &'static str,
        angle: f64,
        min: f64,
        max: f64,
    },

    #[error("phase sequencing: t = {t} s outside window [{start}, {end}]")]
    PhaseSequencing { t: f64, start: f64, end: f64 },

    #[error("illegal mission transition {from} -> {to}")]
    IllegalTransition { from: String, to: String },

    #[error("position ({x}, {y}) outside terrain map")]
    OutOfBounds { x: f64, y: f64 },

    #[error("cannot build a report from an empty log")]
    EmptyReport,

    #[error("config `{field}`: {constraint}")]
    Config { field: String, constraint: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            constraint: constraint.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
