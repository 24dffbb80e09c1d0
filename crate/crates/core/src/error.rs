use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of {func} at {at}")]
    Pole { func: &'static str, at: f64 },
    #[error("{func}: series did not converge within {terms} terms")]
    NonConvergence { func: &'static str, terms: usize },
    #[error("{0}")]
    Domain(String),
    #[error("invalid mode: {0}")]
    InvalidSpec(String),
    #[error("normalization pole: {0}")]
    NormalizationPole(String),
    #[error("parameters are degenerate: {0}")]
    Degenerate(String),
    #[error("stencil leaves the coordinate chart at {0}")]
    ChartBoundary(String),
    #[error("integral diverges: {0}")]
    Divergent(String),
    #[error("extrapolation unstable: {0}")]
    Extrapolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
