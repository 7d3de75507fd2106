use thiserror::Error;

/// Errors raised by the library. The variants map onto the CLI exit-code
/// classes: input problems, contract violations, and resource/capability limits.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LllError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("contract violation at step {step}: {reason}")]
    Contract { step: usize, reason: String },

    #[error("strategy contract violated: {0}")]
    Strategy(String),

    #[error("causality graph violated: {0}")]
    Causality(String),

    #[error("enumeration bound exceeded: {what} (limit {limit})")]
    Resource { what: String, limit: usize },

    #[error("unsupported capability: {0}")]
    Capability(String),

    #[error("no certificate: theta = {theta} is not below 1")]
    NoCertificate { theta: f64 },
}

impl LllError {
    pub fn input(msg: impl Into<String>) -> Self {
        LllError::Input(msg.into())
    }

    pub fn resource(what: impl Into<String>, limit: usize) -> Self {
        LllError::Resource { what: what.into(), limit }
    }

    pub fn capability(msg: impl Into<String>) -> Self {
        LllError::Capability(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, LllError>;
