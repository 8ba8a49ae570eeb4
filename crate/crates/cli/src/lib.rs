//! Sweeps, backend verification and fringe scans for the two-downconverter
//! interferometer, emitting CSV and SVG.

pub mod config;
pub mod error;
pub mod format;
pub mod fringe;
pub mod scan;
pub mod svg;
pub mod verify;

pub use config::{Overrides, ScanConfig};
pub use error::{CliError, Result};
