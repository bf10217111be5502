use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::MAX_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    /// 2^n normalized values written directly as amplitudes.
    Amplitude,
    /// One value per qubit, applied as an Ry angle.
    Angle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ansatz {
    /// U3 / CNOT block, 15 parameters.
    #[serde(rename = "1")]
    A1,
    /// Rx-Rz / controlled-Rx block, 10 parameters.
    #[serde(rename = "2")]
    A2,
}

impl Ansatz {
    pub fn num_params(self) -> usize {
        match self {
            Ansatz::A1 => 15,
            Ansatz::A2 => 10,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Ansatz::A1 => 1,
            Ansatz::A2 => 2,
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Amplitude => "amplitude",
            Encoding::Angle => "angle",
        })
    }
}

/// Full architecture description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub encoding: Encoding,
    pub ansatz: Ansatz,
    pub data_qubits: usize,
    /// Also the number of ancilla qubits.
    pub num_classes: usize,
    /// How many times each convolutional stage is repeated with the same weights.
    #[serde(default = "one")]
    pub conv_repeats_per_stage: usize,
    /// Ablation switch for interaction layers 1 and 2.
    #[serde(default = "yes")]
    pub interaction_layers_enabled: bool,
    /// Four-qubit network without pooling.
    #[serde(default)]
    pub iris_variant: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

impl NetworkConfig {
    /// Eight data qubits, two classes.
    pub fn binary(encoding: Encoding, ansatz: Ansatz) -> Self {
        NetworkConfig {
            encoding,
            ansatz,
            data_qubits: 8,
            num_classes: 2,
            conv_repeats_per_stage: 1,
            interaction_layers_enabled: true,
            iris_variant: false,
        }
    }

    /// Eight data qubits, `num_classes` ancillas and two cascaded convolutional
    /// layers per stage.
    pub fn multiclass(encoding: Encoding, ansatz: Ansatz, num_classes: usize) -> Self {
        NetworkConfig {
            num_classes,
            conv_repeats_per_stage: 2,
            ..Self::binary(encoding, ansatz)
        }
    }

    /// Four angle-encoded qubits, three ancillas, no pooling. Uses ansatz 2
    /// so the total comes to 31 parameters.
    pub fn iris() -> Self {
        NetworkConfig {
            encoding: Encoding::Angle,
            ansatz: Ansatz::A2,
            data_qubits: 4,
            num_classes: 3,
            conv_repeats_per_stage: 1,
            interaction_layers_enabled: true,
            iris_variant: true,
        }
    }

    pub fn with_interaction_layers(mut self, enabled: bool) -> Self {
        self.interaction_layers_enabled = enabled;
        self
    }

    pub fn total_qubits(&self) -> usize {
        self.data_qubits + self.num_classes
    }

    /// Length of the feature vector the encoder expects.
    pub fn input_len(&self) -> usize {
        match self.encoding {
            Encoding::Amplitude => 1 << self.data_qubits,
            Encoding::Angle => self.data_qubits,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_classes < 2 {
            return Err(Error::Config(format!(
                "num_classes must be at least 2, got {}",
                self.num_classes
            )));
        }
        if self.total_qubits() > MAX_QUBITS {
            return Err(Error::Config(format!(
                "{} data qubits + {} ancillas exceeds the {MAX_QUBITS}-qubit limit",
                self.data_qubits, self.num_classes
            )));
        }
        if self.conv_repeats_per_stage == 0 {
            return Err(Error::Config("conv_repeats_per_stage must be >= 1".into()));
        }
        if self.iris_variant {
            if self.data_qubits != 4 {
                return Err(Error::Config(format!(
                    "the iris variant uses 4 data qubits, got {}",
                    self.data_qubits
                )));
            }
            if self.encoding != Encoding::Angle {
                return Err(Error::Config(
                    "the iris variant requires angle encoding".into(),
                ));
            }
        } else if self.data_qubits != 8 {
            return Err(Error::Config(format!(
                "the pooled network uses 8 data qubits, got {}",
                self.data_qubits
            )));
        }
        Ok(())
    }
}
