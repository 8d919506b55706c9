//! Harness error classification driving the process exit codes.

use std::fmt;

/// Errors surfaced by the harness, split by exit-code class: configuration
/// and validation problems exit with status 2, numerical or I/O failures
/// during a run exit with status 1.
#[derive(Debug)]
pub enum HarnessError {
    /// The configuration failed to parse or validate; `field` names the
    /// offending entry.
    Validation { field: String, message: String },
    /// Integration, fitting, or file emission failed after validation.
    Numerical { message: String },
}

impl HarnessError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Validation { field: field.into(), message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        HarnessError::Numerical { message: message.into() }
    }

    /// Process exit status for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation { .. } => 2,
            HarnessError::Numerical { .. } => 1,
        }
    }

    /// Machine-readable form, printed on stderr by the binary.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            HarnessError::Validation { field, message } => serde_json::json!({
                "error": { "kind": "validation", "field": field, "message": message }
            }),
            HarnessError::Numerical { message } => serde_json::json!({
                "error": { "kind": "numerical", "message": message }
            }),
        }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Validation { field, message } => {
                write!(f, "invalid configuration ({field}): {message}")
            }
            HarnessError::Numerical { message } => write!(f, "run failed: {message}"),
        }
    }
}

impl std::error::Error for HarnessError {}

pub type Result<T> = std::result::Result<T, HarnessError>;
