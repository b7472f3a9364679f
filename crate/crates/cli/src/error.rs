//! Command-line failure channel. Every error carries the exit code its
//! class maps to: 2 for parse and validation problems, 3 for dimension
//! mismatches, 4 for internal assertions (an identity residual above the
//! tolerance, which indicates a library bug rather than bad input).

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Validation(String),
    Dimension(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Parse(_) | Self::Validation(_) => 2,
            Self::Dimension(_) => 3,
            Self::Internal(_) => 4,
        }
    }

    /// Wraps a library error, keeping its exit-code class.
    pub fn from_lib(context: &str, e: qcorr::Error) -> Self {
        let message = format!("{context}: {e}");
        match e {
            qcorr::Error::DimensionMismatch { .. } | qcorr::Error::ShapeMismatch { .. } => {
                Self::Dimension(message)
            }
            qcorr::Error::ToleranceExceeded { .. } => Self::Internal(message),
            _ => Self::Validation(message),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Parse(m) | Self::Validation(m) | Self::Dimension(m) | Self::Internal(m) => {
                f.write_str(m)
            }
        }
    }
}
