//! Library surface of the `twirl` CLI: run configuration schema, the
//! matrix file format, and the command implementations. The binary in
//! `main.rs` is a thin argument-parsing wrapper.

pub mod commands;
pub mod config;
pub mod matfile;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<twirl_core::Error> for CliError {
    fn from(e: twirl_core::Error) -> Self {
        match e {
            twirl_core::Error::NumericFailure(m) => CliError::Numeric(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Flag overrides applied on top of the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}
