use std::fmt;

/// Failure of a command, carrying its exit code: 2 for anything the user can
/// fix on the command line, 3 for numerical non-convergence.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Numerical(msg) => f.write_str(msg),
        }
    }
}

impl From<bec_core::Error> for CliError {
    fn from(e: bec_core::Error) -> Self {
        match e {
            bec_core::Error::NonConverged { .. } | bec_core::Error::InvalidBracket { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}
