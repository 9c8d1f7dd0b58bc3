use orbits_core::{ErrorClass, OrbitError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Orbit(#[from] OrbitError),

    #[error(
        "particle escaped: radius {gamma} exceeds {limit} at t = {t} (rerun with --allow-escape)"
    )]
    Escape { t: f64, gamma: f64, limit: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Escape { .. } => 3,
            CliError::Orbit(e) => match e.class() {
                ErrorClass::Input => 2,
                ErrorClass::Domain => 3,
                ErrorClass::Numerical => 4,
            },
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Escape { .. } => "escape",
            CliError::Orbit(e) => e.code(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "error": {
                "code": self.code(),
                "exit_code": self.exit_code(),
                "message": self.to_string(),
            }
        })
    }
}

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub type Result<T> = std::result::Result<T, CliError>;
