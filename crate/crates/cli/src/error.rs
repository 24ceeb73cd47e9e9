use std::process::ExitCode;

use prequant::flow::FlowError;
use prequant::operator::OperatorError;
use prequant::quantum::QuantumError;
use prequant::scenario::ScenarioError;
use prequant::verify::{ToleranceError, VerifyError};
use prequant::EvalError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Output(_) => ExitCode::from(1),
            CliError::Config(_) => ExitCode::from(2),
            CliError::Numerical(_) => ExitCode::from(3),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ToleranceError> for CliError {
    fn from(e: ToleranceError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<QuantumError> for CliError {
    fn from(e: QuantumError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Scenario(s) => s.into(),
            other => CliError::Numerical(other.to_string()),
        }
    }
}
