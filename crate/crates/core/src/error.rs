//! Crate-wide error with the CLI exit-code mapping.
//!
//! Exit codes: 2 for malformed input, 3 for a violated formula
//! precondition, 4 for a numerical method that failed to converge.

use serde::Serialize;
use thiserror::Error;

use crate::dimension::DimensionError;
use crate::moduli3::ModuliError;
use crate::specflow::SpecflowError;
use crate::spinc::SpincError;
use crate::sumformula::SumError;
use crate::topology::TopologyError;
use crate::vortex::VortexError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Spinc(#[from] SpincError),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error(transparent)]
    Specflow(#[from] SpecflowError),
    #[error(transparent)]
    Sum(#[from] SumError),
    #[error(transparent)]
    Vortex(#[from] VortexError),
}

pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Machine-readable form of an error, printed by the CLI on failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
}

impl Error {
    pub fn io(path: impl std::fmt::Display, e: std::io::Error) -> Self {
        Error::Io { path: path.to_string(), message: e.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::Io { .. } => EXIT_SCHEMA,
            Error::Vortex(VortexError::NoConvergence { .. }) => EXIT_NUMERICAL,
            Error::Specflow(SpecflowError::BudgetExhausted(_)) => EXIT_NUMERICAL,
            Error::Specflow(SpecflowError::Parse(_)) => EXIT_SCHEMA,
            Error::Vortex(VortexError::InvalidGeometry(_)) => EXIT_SCHEMA,
            Error::Topology(TopologyError::Overflow) | Error::Spinc(SpincError::Topology(TopologyError::Overflow)) => {
                EXIT_PRECONDITION
            }
            Error::Topology(_) | Error::Spinc(SpincError::Topology(_)) => EXIT_SCHEMA,
            _ => EXIT_PRECONDITION,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Schema(_) => "schema",
            Error::Io { .. } => "io",
            Error::Topology(_) => "topology",
            Error::Spinc(_) => "spinc",
            Error::Dimension(_) => "dimension",
            Error::Moduli(_) => "moduli",
            Error::Specflow(_) => "specflow",
            Error::Sum(_) => "sum",
            Error::Vortex(_) => "vortex",
        }
    }

    pub fn record(&self) -> ErrorRecord {
        ErrorRecord { kind: self.kind(), message: self.to_string(), exit_code: self.exit_code() }
    }
}
