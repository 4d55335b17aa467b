use thiserror::Error;

use crate::vf_analyzer::FiltrationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("Hörmander condition not certified at step {max_step}")]
    HormanderNotCertified {
        max_step: usize,
        report: Box<FiltrationReport>,
    },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("integrand decay not detected within radius {radius}")]
    DecayNotDetected { radius: f64 },

    #[error("numerical non-convergence: {message} (best estimate {estimate:e}, bound {bound:e})")]
    NonConvergence {
        message: String,
        estimate: f64,
        bound: f64,
    },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
