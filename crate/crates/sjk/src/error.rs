use serde_json::json;

/// Exit status for a successful command or a passing verification.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Domain(#[from] sjk_core::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Input(_) => "InputError",
            CliError::Io { .. } => "IoError",
            CliError::Domain(e) => e.kind(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => EXIT_DOMAIN,
            _ => EXIT_USAGE,
        }
    }

    /// `{"error": {"kind": ..., "detail": ...}}`.
    pub fn to_json(&self) -> serde_json::Value {
        json!({"error": {"kind": self.kind(), "detail": self.to_string()}})
    }
}
