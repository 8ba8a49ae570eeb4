//! Two-downconverter induced-coherence model.
//!
//! Two independent backends compute the second-order moments of the signal
//! fields produced when the idler of one parametric downconverter is fed,
//! through a beam splitter of transmission amplitude `t`, into a second
//! downconverter:
//!
//! * [`bogoliubov`] composes exact Heisenberg-picture mode transforms and reads
//!   vacuum moments off the coefficient matrices;
//! * [`fock`] evolves the four-mode vacuum in a truncated number basis and
//!   measures the moments directly.
//!
//! [`experiment`] builds the chain, evaluates the first-order coherence
//! `g1` by three routes and simulates the final fringe scan.

pub mod bogoliubov;
pub mod error;
pub mod experiment;
pub mod fock;
pub mod modes;
pub mod moments;

pub use bogoliubov::BogoliubovTransform;
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, FringeScanResult};
pub use fock::{FockState, GeneratorSpec};
pub use modes::{Ladder, ModeId, ModeLayout};
pub use moments::MomentSet;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
