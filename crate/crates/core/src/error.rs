use thiserror::Error;

use crate::chnc::IntegrandRow;
use crate::grid::Space;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{op} expects a {expected} function, got {found}")]
    WrongSpace {
        op: &'static str,
        expected: Space,
        found: Space,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("1 + n h(k) = {value:e} at k = {k}: total correlation is unphysical")]
    SingularOz { k: f64, value: f64 },

    #[error("pair function tail has not decayed: max |g - 1| = {deviation:e} near r_max")]
    UndecayedTail { deviation: f64 },

    #[error("HNC iteration did not converge in {iterations} iterations (residual {residual:e}, worst pair {pair})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        pair: String,
    },

    #[error("HNC iteration diverged at iteration {iterations} (residual {residual:e}, worst pair {pair})")]
    Diverged {
        iterations: usize,
        residual: f64,
        pair: String,
    },

    #[error("chemical potential solve failed: {0}")]
    ChemicalPotential(String),

    #[error("coupling-constant sweep failed at lambda = {lambda}: {source}")]
    CouplingSweep {
        lambda: f64,
        #[source]
        source: Box<Error>,
        partial: Vec<IntegrandRow>,
    },

    #[error("temperature is zero: the thermal wavelength is infinite, quantum at any scale")]
    ZeroTemperature,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::WrongSpace { .. }
                | Error::GridMismatch(_)
                | Error::UndecayedTail { .. }
                | Error::ZeroTemperature
                | Error::Parse { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
