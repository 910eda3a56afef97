use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state outside the model domain: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solver did not converge at T = {t}: {detail}")]
    NoConvergence { t: f64, detail: String },

    #[error("saturation scan failed at node {index} (T = {t}): {source}")]
    ScanNode {
        index: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("second fundamental form is not symmetric: dT/dV|S = {dt_dv_s}, -dP/dS|V = {minus_dp_ds_v}")]
    Asymmetric { dt_dv_s: f64, minus_dp_ds_v: f64 },

    #[error("tangent direction is the zero vector")]
    ZeroVector,

    #[error("edge of regression is singular at T = {t} (|P''| = {p_second:e})")]
    SingularEdge { t: f64, p_second: f64 },

    #[error("temperature {t} outside the saturation curve [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("power-law fit needs at least {needed} points in the window, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("series '{label}' has zero or sign-changing values inside the fit window")]
    SignChange { label: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
