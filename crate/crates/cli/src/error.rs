use serde::Serialize;
use thiserror::Error;

use curtail::dp::DpError;
use curtail::exact::ExactError;
use curtail::online::OnlineError;
use curtail::scenario::ScenarioError;
use curtail::FairError;

/// Every failure maps to one exit status and one `kind` in the error JSON.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    BoundViolation(String),
    #[error("{0}")]
    Solver(String),
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    kind: &'a str,
    message: String,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) => 1,
            CliError::Input(_) => 2,
            CliError::BoundViolation(_) => 3,
            CliError::Solver(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Infeasible(_) => "infeasible",
            CliError::BoundViolation(_) => "bound_violation",
            CliError::Solver(_) => "solver",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ErrorJson {
            kind: self.kind(),
            message: self.to_string(),
        })
        .unwrap_or_else(|_| format!("{{\"kind\":\"{}\"}}", self.kind()))
    }
}

pub fn input(message: impl Into<String>) -> CliError {
    CliError::Input(message.into())
}

impl From<DpError> for CliError {
    fn from(e: DpError) -> Self {
        match e {
            DpError::InconsistentTable { .. } => CliError::Solver(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<FairError> for CliError {
    fn from(e: FairError) -> Self {
        if e.is_infeasible() {
            return CliError::Infeasible(e.to_string());
        }
        match e {
            FairError::MissingBudgets | FairError::InvalidConfig(_) | FairError::Evaluate(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<OnlineError> for CliError {
    fn from(e: OnlineError) -> Self {
        match e {
            OnlineError::Internal(_) => CliError::Solver(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<curtail::model::EvaluateError> for CliError {
    fn from(e: curtail::model::EvaluateError) -> Self {
        CliError::Input(e.to_string())
    }
}
