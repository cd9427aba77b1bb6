use thiserror::Error;

pub type Result<T, E = NcError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NcError {
    /// Parameters outside the region where a real representation exists.
    #[error("DomainError: {0}")]
    Domain(String),
    /// A parameter map that diverges at the requested point.
    #[error("DegenerateError: {0}")]
    Degenerate(String),
    #[error("ConfigError: {0}")]
    Config(String),
    #[error("StepError: {0}")]
    Step(String),
    #[error("SingularMapError: {0}")]
    SingularMap(String),
}

impl NcError {
    /// Stable error name, as printed by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            NcError::Domain(_) => "DomainError",
            NcError::Degenerate(_) => "DegenerateError",
            NcError::Config(_) => "ConfigError",
            NcError::Step(_) => "StepError",
            NcError::SingularMap(_) => "SingularMapError",
        }
    }
}
