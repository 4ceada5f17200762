//! CLI error taxonomy and exit codes.

use thiserror::Error;

/// Exit code for configuration problems (bad file, bad key, bad value).
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for data and model errors (dispersion files, computations).
pub const EXIT_DATA: i32 = 3;
/// Exit code for filesystem errors.
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Data(_) => EXIT_DATA,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

macro_rules! from_data_error {
    ($($t:ty),* $(,)?) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        })*
    };
}

from_data_error!(
    wgspdc::dispersion::DispersionError,
    wgspdc::phasematching::PhaseMatchingError,
    wgspdc::pump::PumpError,
    wgspdc::modes::ModeError,
    wgspdc::jsa::JsaError,
    wgspdc::detection::DetectionError,
    wgspdc::design::DesignError,
    wgspdc::grid::GridError,
);
