//! Open-system spin-chain dynamics with nearest-neighbor entanglement freezing analysis.
//!
//! Sites are 1-based; site `s` of an `L`-site register is bit `L - s` of a
//! computational-basis index, and a cleared bit is spin up (`σz = +1`).

// `!(x > 0.0)` style guards are kept because they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod entanglement;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod models;
pub mod open_system;
pub mod pauli;
pub mod state;

pub use error::{Error, Result};
pub use pauli::{Axis, CMatrix, OperatorSum, PauliString};
pub use state::DensityMatrix;
