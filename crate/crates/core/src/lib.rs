//! Quantum convolutional neural network with Toffoli interaction layers,
//! simulated on a dense statevector and trained classically.
//!
//! The crate is split the same way the pipeline runs:
//!
//! * [`qstate`] holds the register, the gate catalogue and readout.
//! * [`circuit`] turns a [`NetworkConfig`] into a gate program with shared
//!   parameter slots and runs it.
//! * [`datapipe`] loads MNIST-style IDX files and Iris CSV and reduces them
//!   to network inputs.
//! * [`trainer`] implements loss, gradients, Nesterov updates and the
//!   multi-seed experiment loop.

pub mod circuit;
pub mod datapipe;
mod error;
pub mod qstate;
pub mod trainer;

pub use circuit::{build_forward, param_count, Ansatz, Encoding, NetworkConfig, ParameterVector, Program};
pub use error::{Error, Result};
pub use qstate::{GateKind, GateSpec, StateVector};
