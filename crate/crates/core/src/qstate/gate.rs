use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A 2x2 complex matrix acting on a single target qubit, row-major.
pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    PauliX,
    Rx,
    Ry,
    Rz,
    CRx,
    CRy,
    CRz,
    #[serde(rename = "CNOT")]
    Cnot,
    Toffoli,
    U3,
    AntiControlledRx,
}

impl GateKind {
    pub const ALL: [GateKind; 11] = [
        GateKind::PauliX,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::CRx,
        GateKind::CRy,
        GateKind::CRz,
        GateKind::Cnot,
        GateKind::Toffoli,
        GateKind::U3,
        GateKind::AntiControlledRx,
    ];

    pub fn num_params(self) -> usize {
        match self {
            GateKind::PauliX | GateKind::Cnot | GateKind::Toffoli => 0,
            GateKind::U3 => 3,
            _ => 1,
        }
    }

    pub fn num_controls(self) -> usize {
        match self {
            GateKind::CRx | GateKind::CRy | GateKind::CRz | GateKind::Cnot => 1,
            GateKind::Toffoli => 2,
            _ => 0,
        }
    }

    pub fn num_open_controls(self) -> usize {
        usize::from(self == GateKind::AntiControlledRx)
    }

    /// Whether the gate acts on its target only when a control condition holds.
    pub fn is_controlled(self) -> bool {
        self.num_controls() + self.num_open_controls() > 0
    }

    /// The single-target unitary, before any control is attached.
    pub fn base_matrix(self, params: &[f64]) -> Mat2 {
        match self {
            GateKind::PauliX | GateKind::Cnot | GateKind::Toffoli => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::Rx | GateKind::CRx | GateKind::AntiControlledRx => rx(params[0]),
            GateKind::Ry | GateKind::CRy => ry(params[0]),
            GateKind::Rz | GateKind::CRz => rz(params[0]),
            GateKind::U3 => u3(params[0], params[1], params[2]),
        }
    }

    /// Derivative of [`GateKind::base_matrix`] with respect to `params[index]`.
    pub fn base_derivative(self, params: &[f64], index: usize) -> Mat2 {
        match self {
            GateKind::PauliX | GateKind::Cnot | GateKind::Toffoli => {
                panic!("{self:?} has no parameters")
            }
            GateKind::Rx | GateKind::CRx | GateKind::AntiControlledRx => {
                let (s, c) = (params[0] / 2.0).sin_cos();
                [
                    [C64::new(-s / 2.0, 0.0), C64::new(0.0, -c / 2.0)],
                    [C64::new(0.0, -c / 2.0), C64::new(-s / 2.0, 0.0)],
                ]
            }
            GateKind::Ry | GateKind::CRy => {
                let (s, c) = (params[0] / 2.0).sin_cos();
                [
                    [C64::new(-s / 2.0, 0.0), C64::new(-c / 2.0, 0.0)],
                    [C64::new(c / 2.0, 0.0), C64::new(-s / 2.0, 0.0)],
                ]
            }
            GateKind::Rz | GateKind::CRz => {
                let half = params[0] / 2.0;
                let i_half = C64::new(0.0, 0.5);
                [
                    [-i_half * C64::from_polar(1.0, -half), ZERO],
                    [ZERO, i_half * C64::from_polar(1.0, half)],
                ]
            }
            GateKind::U3 => {
                let (theta, phi, lambda) = (params[0], params[1], params[2]);
                let (s, c) = (theta / 2.0).sin_cos();
                let e_phi = C64::from_polar(1.0, phi);
                let e_lambda = C64::from_polar(1.0, lambda);
                let e_both = C64::from_polar(1.0, phi + lambda);
                let i = C64::i();
                match index {
                    0 => [
                        [C64::new(-s / 2.0, 0.0), -e_lambda * (c / 2.0)],
                        [e_phi * (c / 2.0), -e_both * (s / 2.0)],
                    ],
                    1 => [[ZERO, ZERO], [i * e_phi * s, i * e_both * c]],
                    2 => [[ZERO, -i * e_lambda * s], [ZERO, i * e_both * c]],
                    _ => panic!("U3 has three parameters, got index {index}"),
                }
            }
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GateKind::PauliX => "X",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::CRx => "CRX",
            GateKind::CRy => "CRY",
            GateKind::CRz => "CRZ",
            GateKind::Cnot => "CNOT",
            GateKind::Toffoli => "TOFFOLI",
            GateKind::U3 => "U3",
            GateKind::AntiControlledRx => "ACRX",
        };
        f.write_str(name)
    }
}

pub fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(0.0, -s)],
        [C64::new(0.0, -s), C64::new(c, 0.0)],
    ]
}

pub fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

pub fn rz(theta: f64) -> Mat2 {
    [
        [C64::from_polar(1.0, -theta / 2.0), ZERO],
        [ZERO, C64::from_polar(1.0, theta / 2.0)],
    ]
}

pub fn u3(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), -C64::from_polar(s, lambda)],
        [C64::from_polar(s, phi), C64::from_polar(c, phi + lambda)],
    ]
}

/// Conjugate transpose.
pub fn dagger(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

/// One gate instance: kind, qubits and bound angles.
///
/// Every gate in the catalogue has exactly one target. `controls` fire on
/// |1>, `open_controls` fire on |0>.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
    pub open_controls: Vec<usize>,
    pub params: Vec<f64>,
}

impl GateSpec {
    fn single(kind: GateKind, target: usize, params: Vec<f64>) -> Self {
        GateSpec {
            kind,
            targets: vec![target],
            controls: Vec::new(),
            open_controls: Vec::new(),
            params,
        }
    }

    fn controlled(kind: GateKind, controls: Vec<usize>, target: usize, params: Vec<f64>) -> Self {
        GateSpec {
            kind,
            targets: vec![target],
            controls,
            open_controls: Vec::new(),
            params,
        }
    }

    pub fn x(target: usize) -> Self {
        Self::single(GateKind::PauliX, target, vec![])
    }

    pub fn rx(target: usize, theta: f64) -> Self {
        Self::single(GateKind::Rx, target, vec![theta])
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        Self::single(GateKind::Ry, target, vec![theta])
    }

    pub fn rz(target: usize, theta: f64) -> Self {
        Self::single(GateKind::Rz, target, vec![theta])
    }

    pub fn u3(target: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Self::single(GateKind::U3, target, vec![theta, phi, lambda])
    }

    pub fn crx(control: usize, target: usize, theta: f64) -> Self {
        Self::controlled(GateKind::CRx, vec![control], target, vec![theta])
    }

    pub fn cry(control: usize, target: usize, theta: f64) -> Self {
        Self::controlled(GateKind::CRy, vec![control], target, vec![theta])
    }

    pub fn crz(control: usize, target: usize, theta: f64) -> Self {
        Self::controlled(GateKind::CRz, vec![control], target, vec![theta])
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::controlled(GateKind::Cnot, vec![control], target, vec![])
    }

    pub fn toffoli(control1: usize, control2: usize, target: usize) -> Self {
        Self::controlled(GateKind::Toffoli, vec![control1, control2], target, vec![])
    }

    pub fn anti_crx(open_control: usize, target: usize, theta: f64) -> Self {
        GateSpec {
            kind: GateKind::AntiControlledRx,
            targets: vec![target],
            controls: Vec::new(),
            open_controls: vec![open_control],
            params: vec![theta],
        }
    }

    /// Build a gate of `kind` from a qubit list (controls first, target last) and an angle
    /// list that may be longer than the kind needs.
    pub fn with_kind(kind: GateKind, qubits: &[usize], params: &[f64]) -> Self {
        let p = params[..kind.num_params()].to_vec();
        match kind {
            GateKind::PauliX | GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::U3 => {
                Self::single(kind, qubits[0], p)
            }
            GateKind::CRx | GateKind::CRy | GateKind::CRz | GateKind::Cnot => {
                Self::controlled(kind, vec![qubits[0]], qubits[1], p)
            }
            GateKind::Toffoli => Self::controlled(kind, vec![qubits[0], qubits[1]], qubits[2], p),
            GateKind::AntiControlledRx => Self::anti_crx(qubits[0], qubits[1], p[0]),
        }
    }

    /// Total number of qubits the gate touches.
    pub fn arity(&self) -> usize {
        self.targets.len() + self.controls.len() + self.open_controls.len()
    }

    /// Qubits in local-matrix order: controls, open controls, target.
    pub fn qubits(&self) -> Vec<usize> {
        self.controls
            .iter()
            .chain(&self.open_controls)
            .chain(&self.targets)
            .copied()
            .collect()
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let kind = self.kind;
        if self.targets.len() != 1 {
            return Err(Error::Usage(format!(
                "{kind} takes exactly one target, got {:?}",
                self.targets
            )));
        }
        if self.controls.len() != kind.num_controls()
            || self.open_controls.len() != kind.num_open_controls()
        {
            return Err(Error::Usage(format!(
                "{kind} expects {} control(s) and {} open control(s), got {:?} / {:?}",
                kind.num_controls(),
                kind.num_open_controls(),
                self.controls,
                self.open_controls
            )));
        }
        if self.params.len() != kind.num_params() {
            return Err(Error::Usage(format!(
                "{kind} expects {} parameter(s), got {}",
                kind.num_params(),
                self.params.len()
            )));
        }
        let qubits = self.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(Error::Usage(format!(
                    "{kind}: qubit {q} out of range for a {num_qubits}-qubit register"
                )));
            }
            if qubits[..i].contains(&q) {
                return Err(Error::Usage(format!("{kind}: qubit {q} used twice")));
            }
        }
        Ok(())
    }

    pub fn base_matrix(&self) -> Mat2 {
        self.kind.base_matrix(&self.params)
    }

    pub fn control_mask(&self) -> usize {
        self.controls.iter().fold(0, |m, &q| m | (1 << q))
    }

    pub fn open_control_mask(&self) -> usize {
        self.open_controls.iter().fold(0, |m, &q| m | (1 << q))
    }
}

/// Dense unitary of a gate on its own qubits.
///
/// Local basis ordering: the qubits are listed as controls, open controls,
/// then the target, and the first listed qubit is the most significant bit of
/// the row/column index. With that ordering CNOT swaps rows 2 and 3 and
/// Toffoli swaps rows 6 and 7.
pub fn gate_matrix(gate: &GateSpec) -> DMatrix<C64> {
    let k = gate.arity();
    let dim = 1usize << k;
    let n_closed = gate.controls.len();
    let n_open = gate.open_controls.len();
    let base = gate.base_matrix();
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    for col in 0..dim {
        // bit for listed qubit j sits at position k-1-j
        let bit = |j: usize| (col >> (k - 1 - j)) & 1;
        let fires = (0..n_closed).all(|j| bit(j) == 1)
            && (n_closed..n_closed + n_open).all(|j| bit(j) == 0);
        if fires {
            let t = col & 1;
            let rest = col & !1;
            m[(rest, col)] = base[0][t];
            m[(rest | 1, col)] = base[1][t];
        } else {
            m[(col, col)] = ONE;
        }
    }
    m
}
