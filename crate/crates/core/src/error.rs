use thiserror::Error;

#[derive(Debug, Error)]
pub enum StratoError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("size mismatch: expected {expected} samples, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("invalid truncation: r = {r} must be positive and below R = {big_r}")]
    InvalidTruncation { r: f64, big_r: f64 },
    #[error("the symbol is undefined at the zero wavevector")]
    ZeroWavevector,
    #[error("wavevector {xi:?} outside the validity region: {reason}")]
    Domain { xi: [f64; 3], reason: String },
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("field is not divergence free (relative residual {0:e})")]
    NotDivergenceFree(f64),
    #[error("CFL violation at t = {t}: dt = {dt} exceeds the limit {limit} (max |v| = {vmax})")]
    Cfl {
        t: f64,
        dt: f64,
        limit: f64,
        vmax: f64,
    },
    #[error("numerical blow-up (non-finite state) at t = {0}")]
    BlowUp(f64),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("resolution: {0}")]
    Resolution(String),
    #[error("norm of an empty field")]
    EmptyField,
    #[error("config: {0}")]
    Config(String),
    #[error("snapshot format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, StratoError>;
