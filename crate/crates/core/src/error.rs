use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),
    #[error("invalid dynamics input: {0}")]
    Dynamics(String),
    #[error("invalid safety query: {0}")]
    Safety(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
    #[error("scenario file: {0}")]
    ScenarioFile(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
