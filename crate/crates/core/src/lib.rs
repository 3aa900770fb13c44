//! Construction, verification and entanglement classification of generalized
//! Yang-Baxter operators built from set-partition algebra generators.
//!
//! Layers, bottom-up: [`tensor`] (dense complex operators), [`diagram`]
//! (exact set-partition diagrams), [`rep`] (qubit and Temperley-Lieb
//! matrices for generator words), [`families`] (the registered ansätze and a
//! numeric solver), [`verify`] and [`entangle`] (checks and classifiers), and
//! [`tables`] (golden reproduction of published solution tables).

pub mod diagram;
pub mod entangle;
pub mod error;
pub mod families;
pub mod par;
pub mod relations;
pub mod rep;
pub mod report;
pub mod tables;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use tensor::{DenseOperator, EigenMultiset, C64};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Default RNG seed shared by the solver, sweeps and the command-line tool.
pub const DEFAULT_SEED: u64 = 0xB41D;
