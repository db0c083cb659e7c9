//! Qubit erasure against a truncated thermal oscillator: Jaynes-Cummings
//! dynamics, the heat/entropy/information ledger, and sideband thermometry.
//!
//! The numerical core is generic over [`Real`]; the aliases below fix the
//! scalar for the common cases. Readout and protocol work in `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod info;
pub mod ion;
pub mod linalg;
pub mod protocol;
pub mod readout;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type CMatrix = linalg::ComplexMatrix<f64>;
pub type Density = linalg::DensityMatrix<f64>;
pub type Joint = ion::JointState<f64>;
pub type Pulse = ion::PulseParams<f64>;
pub type Ledger = info::LandauerLedger<f64>;

pub type CMatrix32 = linalg::ComplexMatrix<f32>;
pub type Density32 = linalg::DensityMatrix<f32>;
pub type Joint32 = ion::JointState<f32>;
pub type Pulse32 = ion::PulseParams<f32>;
pub type Ledger32 = info::LandauerLedger<f32>;
