use crate::bounds::FisherMatrix;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what}: argument {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },
    #[error("{what} diverges to infinity at this argument")]
    Infinite { what: &'static str },
    #[error("invalid model parameters: {0}")]
    InvalidParams(&'static str),
    #[error("the bivariate distribution is degenerate at r = 1")]
    DegenerateDistribution,
    #[error("sample is empty")]
    EmptySample,
    #[error("sample arrays have mismatched lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),
    #[error("Fisher information is singular or ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("quadrature error estimate {achieved:e} exceeds tolerance {tolerance:e}")]
    Accuracy {
        achieved: f64,
        tolerance: f64,
        estimate: FisherMatrix,
    },
    #[error("internal numerical error: {0}")]
    Internal(&'static str),
}
