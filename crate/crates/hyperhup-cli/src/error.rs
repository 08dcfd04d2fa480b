use hyperhup_core::HupError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] HupError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => EXIT_INPUT,
            CliError::Core(HupError::InvalidInput(_)) => EXIT_INPUT,
            CliError::Core(HupError::Infeasible(_)) => EXIT_INFEASIBLE,
            CliError::Core(HupError::Numerical(_) | HupError::Construction(_)) => EXIT_FAILURE,
        }
    }
}
