//! Compile cubic and quartic pseudo-Boolean optimization problems (PUBO)
//! into quadratic form (QUBO) with exact classical gadgets.

pub mod ancilla;
pub mod bench;
pub mod compile;
pub mod error;
pub mod gadget;
pub mod poly;
pub mod precision;
pub mod quartic;
pub mod verify;

pub use error::{Error, Result};
