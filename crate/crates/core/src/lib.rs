//! Relative Seiberg-Witten toolkit for pairs (X, Σ).

pub mod cli;
pub mod dimension;
pub mod error;
pub mod moduli3;
pub mod rational;
pub mod specflow;
pub mod spinc;
pub mod sumformula;
pub mod topology;
pub mod vortex;

pub use error::{Error, ErrorRecord};
