use thiserror::Error;

use crate::model::AdmissibilityReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parameter {name} = {value} must be a non-negative finite number")]
    NegativeParameter { name: &'static str, value: f64 },

    #[error("inadmissible parameters: {0}")]
    InadmissibleParams(AdmissibilityReport),

    #[error("inadmissible parameters: {entry} = {value} is outside [0,1]")]
    TensorEntryOutOfRange { entry: String, value: f64 },

    #[error("point is not on the simplex: {0}")]
    InvalidPoint(String),

    #[error("tensor violates the QSO axioms: {0}")]
    InvalidTensor(String),

    #[error("degenerate regime: {0}")]
    DegenerateRegime(String),

    #[error("no interior fixed point: {0}")]
    NoInteriorPoint(String),

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NonConvergence { iterations: usize },

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("regime {0} admits no admissible parameters")]
    RegimeUnsatisfiable(String),
}
