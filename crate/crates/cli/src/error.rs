use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed scenario file; `message` carries the line and column.
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("scenario field `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error(transparent)]
    Model(#[from] shvel::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Validation { .. } => "validation",
            CliError::Model(_) => "model",
            CliError::Io { .. } => "io",
        }
    }

    /// Single-line JSON object describing the failure.
    pub fn to_json(&self) -> String {
        let mut v = json!({ "kind": self.kind(), "message": self.to_string() });
        if let CliError::Validation { field, .. } = self {
            v["field"] = json!(field);
        }
        v.to_string()
    }
}
