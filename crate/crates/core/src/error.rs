use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular input: {0}")]
    SingularInput(String),
    #[error("outside branch domain: {0}")]
    Domain(String),
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("trajectory blew up at t = {t}: |state| exceeded {bound}")]
    BlowUp { t: f64, bound: f64 },
    #[error("sample {index} at t = {t} lies within {eps} of the momentum-map pole")]
    PoleCrossing { index: usize, t: f64, eps: f64 },
    #[error("grid too coarse: {0} points (need at least 100)")]
    GridTooCoarse(usize),
    #[error("not converged: {0}")]
    NotConverged(String),
    #[error("quadrature not converged: {0}")]
    QuadratureNotConverged(String),
    #[error("basis too small: {0}")]
    BasisTooSmall(String),
}

pub type Result<T> = std::result::Result<T, Error>;
