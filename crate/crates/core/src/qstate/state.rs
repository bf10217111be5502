use num_complex::Complex64;

use super::gate::{GateSpec, Mat2, C64};
use super::kernel;
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 12;

const NORM_TOL: f64 = 1e-10;
const ENCODE_NORM_TOL: f64 = 1e-9;

/// Dense pure state of an n-qubit register.
///
/// Bit `b` of a basis index is the value of qubit `b`, so qubit 0 is the
/// least significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

fn check_qubit_count(num_qubits: usize) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&num_qubits) {
        return Err(Error::Config(format!(
            "register size must be in 1..={MAX_QUBITS}, got {num_qubits}"
        )));
    }
    Ok(())
}

/// |0...0> on `num_qubits` qubits.
pub fn init_zero_state(num_qubits: usize) -> Result<StateVector> {
    check_qubit_count(num_qubits)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
    amplitudes[0] = Complex64::new(1.0, 0.0);
    Ok(StateVector {
        num_qubits,
        amplitudes,
    })
}

impl StateVector {
    /// Wrap an amplitude vector, checking length and normalization.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::Usage(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_qubit_count(num_qubits)?;
        let state = StateVector {
            num_qubits,
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Usage(format!("state norm {norm} is not 1")));
        }
        Ok(state)
    }

    /// Basis state |index>.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let mut s = init_zero_state(num_qubits)?;
        if index >= s.amplitudes.len() {
            return Err(Error::Usage(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        s.amplitudes[0] = Complex64::new(0.0, 0.0);
        s.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Probability that `qubit` reads |1>.
    pub fn prob_one(&self, qubit: usize) -> Result<f64> {
        self.check_index(qubit)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> qubit) & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Overwrite the register with a real, unit-norm vector (amplitude encoding).
    pub fn set_amplitudes(&mut self, vector: &[f64]) -> Result<()> {
        if vector.len() != self.amplitudes.len() {
            return Err(Error::Encoding(format!(
                "{} values cannot be amplitude-encoded on {} qubits (need {})",
                vector.len(),
                self.num_qubits,
                self.amplitudes.len()
            )));
        }
        let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > ENCODE_NORM_TOL {
            return Err(Error::Encoding(format!(
                "amplitude vector has norm {norm}, expected 1"
            )));
        }
        for (a, &x) in self.amplitudes.iter_mut().zip(vector) {
            *a = Complex64::new(x, 0.0);
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &GateSpec) -> Result<()> {
        gate.validate(self.num_qubits)?;
        kernel::apply(
            &mut self.amplitudes,
            gate.targets[0],
            gate.control_mask(),
            gate.open_control_mask(),
            &gate.base_matrix(),
        );
        Ok(())
    }

    /// Apply a raw single-target matrix with control masks. The caller is
    /// responsible for passing a unitary.
    pub(crate) fn apply_matrix(&mut self, target: usize, controls: usize, open: usize, m: &Mat2) {
        kernel::apply(&mut self.amplitudes, target, controls, open, m);
    }

    /// <Z> on `qubit`, summed in index order.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_index(qubit)?;
        Ok(kernel::expectation_z(&self.amplitudes, qubit))
    }

    /// Tensor on `extra` fresh |0> qubits as the new most significant qubits.
    pub fn extend_with_zero_qubits(&mut self, extra: usize) -> Result<()> {
        check_qubit_count(self.num_qubits + extra)?;
        self.num_qubits += extra;
        self.amplitudes
            .resize(1 << self.num_qubits, Complex64::new(0.0, 0.0));
        Ok(())
    }

    fn check_index(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::Usage(format!(
                "qubit {qubit} out of range for a {}-qubit register",
                self.num_qubits
            )));
        }
        Ok(())
    }
}
