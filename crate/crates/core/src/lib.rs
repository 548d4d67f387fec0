//! Statevector simulation and training of contextual quantum neural networks
//! that forecast the distribution of quantized asset returns.

pub mod ansatz;
pub mod circuit;
pub mod cli;
pub mod data;
pub mod error;
pub mod inference;
pub mod io;
pub mod noise;
pub mod rng;
pub mod simulator;
pub mod training;

pub use circuit::{BlockTag, ParamCircuit, PlacedGate};
pub use error::{Error, Result};
