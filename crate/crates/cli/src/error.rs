use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config; exits with code 2.
    Usage(String),
    /// Failure while computing or writing results; exits with code 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<hybrid_chsh_core::Error> for CliError {
    fn from(e: hybrid_chsh_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
