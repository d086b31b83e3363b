use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, names or configuration; exit code 2.
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] liqscreen_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    /// Verification ran and at least one check failed; exit code 1.
    #[error("failed checks: {}", .0.join(", "))]
    Checks(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}
