use hardylab::LabError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    BadInput(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Lab(#[from] LabError),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn bad(msg: impl Into<String>) -> CliError {
    CliError::BadInput(msg.into())
}

/// Exit code contract: 0 pass, 1 check failed, 2 bad input, 3 budget exceeded.
pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_BAD_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::BadInput(_) | CliError::Io { .. } => EXIT_BAD_INPUT,
            CliError::Lab(e) => match e {
                LabError::IterationBudgetExceeded { .. } => EXIT_BUDGET,
                LabError::InvalidInput(_)
                | LabError::OnAxis { .. }
                | LabError::NoRealRoot { .. }
                | LabError::WeightExceedsDecay { .. }
                | LabError::OutOfDomain { .. } => EXIT_BAD_INPUT,
                _ => EXIT_CHECK_FAILED,
            },
        }
    }
}
