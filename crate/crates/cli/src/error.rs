use planar_friction::FrictionError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(FrictionError),

    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<FrictionError> for CliError {
    fn from(e: FrictionError) -> Self {
        match e {
            FrictionError::InvalidParameter(_) | FrictionError::EmptyContact | FrictionError::Cache(_) => {
                CliError::Config(e.to_string())
            }
            FrictionError::Io(_) | FrictionError::Csv(_) => CliError::Io(e.to_string()),
            _ => CliError::Numerical(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
