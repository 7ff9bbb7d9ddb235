//! Command-line front end for netscreen: dataset files, the screening and
//! classification commands, and the Monte Carlo experiment harness.

pub mod commands;
pub mod experiment;
pub mod formats;

use netscreen_core::classify::ClassifyError;
use netscreen_core::plr::PlrError;
use netscreen_core::screening::ScreeningError;
use netscreen_core::simgen::SimError;
use thiserror::Error;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Degenerate(_) => 4,
        }
    }

    pub fn from_sim(e: SimError) -> Self {
        match e {
            SimError::UnknownExample(_) | SimError::ModelMismatch(_) => CliError::Usage(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }

    pub fn from_plr(e: PlrError) -> Self {
        match e {
            PlrError::MissingResponseLevel(_) => CliError::Degenerate(e.to_string()),
            PlrError::NoPermutations => CliError::Usage(e.to_string()),
            PlrError::Data(_) => CliError::Validation(e.to_string()),
        }
    }

    pub fn from_screening(e: ScreeningError) -> Self {
        match e {
            ScreeningError::Plr(p) => Self::from_plr(p),
            ScreeningError::InvalidAlpha(_) | ScreeningError::NoPermutations | ScreeningError::TooFewBins(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }

    pub fn from_classify(e: ClassifyError) -> Self {
        match e {
            ClassifyError::MissingResponseLevel(_) => CliError::Degenerate(e.to_string()),
            ClassifyError::AucNeedsBinary(_) | ClassifyError::InvalidFraction(_) | ClassifyError::InvalidSmoothing(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }

    pub(crate) fn io(context: impl std::fmt::Display, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{context}: {e}"))
    }
}
