use std::fmt;

/// Failure classes, one per process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or config. Exit 1.
    Validation(String),
    /// Missing or malformed input files. Exit 2.
    Data(String),
    /// A numeric check failed or training diverged. Exit 3.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "{m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric check failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qcnn_core::Error> for CliError {
    fn from(e: qcnn_core::Error) -> Self {
        use qcnn_core::Error as E;
        match e {
            E::Config(_) | E::Usage(_) => CliError::Validation(e.to_string()),
            E::Encoding(_) | E::Parse { .. } | E::Io { .. } => CliError::Data(e.to_string()),
            E::Numeric(_) => CliError::Numeric(e.to_string()),
        }
    }
}
