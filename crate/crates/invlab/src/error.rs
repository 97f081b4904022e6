use std::path::PathBuf;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical abort: {0}")]
    Numerical(invlab_core::Error),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("numerical abort: {0}")]
    Aborted(String),

    #[error("{0}")]
    CriteriaFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CriteriaFailed(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) | CliError::Aborted(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<invlab_core::Error> for CliError {
    fn from(e: invlab_core::Error) -> Self {
        match e {
            invlab_core::Error::InvalidParameter(m) => CliError::Config(m),
            other => CliError::Numerical(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::CriteriaFailed("x".into()).exit_code(), 1);
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        let e: CliError = invlab_core::Error::InvalidParameter("eps".into()).into();
        assert_eq!(e.exit_code(), 2);
        let e: CliError = invlab_core::Error::NotMMatrix.into();
        assert_eq!(e.exit_code(), 3);
    }
}
