use thiserror::Error;

/// Errors shared across the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid wave packet: {0}")]
    InvalidPacket(String),

    #[error("invalid switching schedule: {0}")]
    InvalidSchedule(String),

    #[error("network construction failed: {0}")]
    Construction(String),

    #[error("network is invalid: {}", format_violations(.0))]
    InvalidNetwork(Vec<String>),

    #[error("unknown component `{0}`")]
    UnknownComponent(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: {0}")]
    Accuracy(String),

    #[error("simulation guard exceeded: {0}")]
    Guard(String),

    #[error("degenerate profile: {0}")]
    Degenerate(String),

    #[error("insufficient maxima: {0}")]
    InsufficientMaxima(String),

    #[error("undefined visibility: I_max + I_min = 0")]
    UndefinedVisibility,
}

fn format_violations(violations: &[String]) -> String {
    violations.join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
