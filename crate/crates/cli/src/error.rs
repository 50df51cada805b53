use thiserror::Error;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] gaudin_core::Error),

    #[error("{0}")]
    Numerical(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use gaudin_core::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(
                E::ModulusDomain(_)
                | E::InvalidSpin(_)
                | E::InvalidSystem(_)
                | E::InvalidParams(_)
                | E::DimensionTooLarge { .. },
            ) => EXIT_USAGE,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Core(_) | CliError::Numerical(_) | CliError::Output(_) => EXIT_NUMERICAL,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
