//! Network architecture: configuration, parameter layout, layer builders
//! and the executable gate program.

mod config;
pub mod layers;
mod layout;
mod program;

pub use config::{Ansatz, Encoding, NetworkConfig};
pub use layers::Op;
pub use layout::{param_count, ParamLayout, ParameterVector, SlotGroup};
pub use program::{angle_encode, build_forward, Layer, Program, Segment};
