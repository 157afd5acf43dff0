use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular parameterization at t = {t}: |S'(t)| = {speed:e}")]
    SingularParameterization { t: f64, speed: f64 },

    #[error("no convergence after {iterations} iterations (last t = {last_t})")]
    NoConvergence { iterations: usize, last_t: f64 },

    #[error("root left the parameter domain at t = {t}")]
    OutOfDomain { t: f64 },

    #[error("curvature vanishes at t = {t}; evolute point is at infinity")]
    ZeroCurvature { t: f64 },

    #[error("foot at t = {t} is not a local minimum of the distance ({kind})")]
    CertificationFailure { t: f64, kind: String },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("bitmap has an empty foreground")]
    EmptyForeground,

    #[error("bitmap foreground has no boundary cells")]
    EmptyBoundary,

    #[error("parse error: {0}")]
    Parse(String),
}
