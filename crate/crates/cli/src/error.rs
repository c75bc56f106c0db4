use thiserror::Error;

/// Failures mapped onto the exit-code contract: 1 for a failed run, 2 for
/// usage and configuration errors. Check violations are not errors; they are
/// reported and turn into exit code 1 by the caller.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<fwlab::Error> for CliError {
    fn from(e: fwlab::Error) -> Self {
        use fwlab::Error as E;
        match e {
            E::UnknownProfile(_)
            | E::NonFinite(_)
            | E::InvalidParameter(_)
            | E::TimeStepTooLarge { .. }
            | E::Unresolved(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}
