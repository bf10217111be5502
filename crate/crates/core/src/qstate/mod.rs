//! Dense statevector simulation: the gate catalogue, bitmask gate
//! application and Pauli-Z readout.

mod gate;
pub(crate) mod kernel;
mod state;

pub use gate::{dagger, gate_matrix, rx, ry, rz, u3, GateKind, GateSpec, Mat2, C64};
pub use state::{init_zero_state, StateVector, MAX_QUBITS};
