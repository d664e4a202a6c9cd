use flevy::FlevyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Io(String),

    #[error("{0}")]
    Model(FlevyError),

    #[error("numerical error: {0}")]
    Numerical(FlevyError),

    #[error("{0} check(s) failed")]
    VerificationFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Config(_) | CliError::Io(_) | CliError::Model(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<FlevyError> for CliError {
    fn from(e: FlevyError) -> Self {
        match e {
            FlevyError::Quadrature { .. }
            | FlevyError::RootFinding(_)
            | FlevyError::StateSpace(_)
            | FlevyError::InsufficientData(_) => CliError::Numerical(e),
            _ => CliError::Model(e),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
