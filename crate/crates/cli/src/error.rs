// SPDX-License-Identifier: Apache-2.0

use subradiance_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Degenerate(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Degenerate(m) => write!(f, "degenerate input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::DegenerateSource { .. } | CoreError::NoContour(_) => CliError::Degenerate(msg),
            CoreError::StepSize { .. } => CliError::Numerical(msg),
            CoreError::Config(_)
            | CoreError::UnsupportedConfiguration(_)
            | CoreError::Domain(_)
            | CoreError::Capacity(_) => CliError::Config(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
