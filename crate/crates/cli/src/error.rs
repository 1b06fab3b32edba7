use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config file or parameter values.
    #[error("config error: {0}")]
    Config(String),
    /// Unreadable or unsuitable input, or failed output writes.
    #[error("data error: {0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl From<swe_period::Error> for CliError {
    fn from(e: swe_period::Error) -> Self {
        use swe_period::Error as E;
        match e {
            E::InvalidParameter { .. } | E::UnknownFamily(_) | E::MismatchedLandmarks(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
