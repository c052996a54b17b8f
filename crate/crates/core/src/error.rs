use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid paraboloid (a = {a}, b = {b}): {reason}")]
    InvalidParaboloid { a: f64, b: f64, reason: &'static str },
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("outside the real domain: {0}")]
    Domain(String),
    #[error("point is not on the paraboloid (residual {residual:e})")]
    NotOnSurface { residual: f64 },
    #[error("degenerate query: {0}")]
    DegenerateQuery(&'static str),
    #[error("ill-conditioned polynomial: {0}")]
    IllConditioned(String),
    #[error("pole of the parametrization at t = {0}")]
    Pole(f64),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("critical point count did not stabilise: {0:?}")]
    Unstable(Vec<usize>),
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Errors that mean "too close to a caustic to decide" rather than bad input.
    pub fn is_boundary_band(&self) -> bool {
        matches!(
            self,
            Error::IllConditioned(_) | Error::GridTooCoarse(_) | Error::Unstable(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
