use std::path::Path;

/// Errors of the command-line layer, mapped onto process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("configuration error in `{field}`: {message}")]
    Field { field: String, message: String },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("numerical certification failure: {0}")]
    Certification(qei_core::Error),

    #[error(transparent)]
    Core(qei_core::Error),
}

impl CliError {
    pub fn field(field: &str, message: String) -> Self {
        CliError::Field {
            field: field.into(),
            message,
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    /// `2` for configuration and IO problems, `3` for certification
    /// failures. Input errors surfacing from the core are configuration
    /// problems as well.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Certification(_) => 3,
            CliError::Core(e) if e.is_certification() => 3,
            _ => 2,
        }
    }
}

impl From<qei_core::Error> for CliError {
    fn from(e: qei_core::Error) -> Self {
        if e.is_certification() {
            CliError::Certification(e)
        } else {
            CliError::Core(e)
        }
    }
}
