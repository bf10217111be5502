//! Gate-program builders for each layer of the network.
//!
//! Builders emit [`Op`]s whose angles are slot indices into the flat
//! parameter vector, so weight sharing is just several ops reading the same
//! slot. Ops are listed in application order.

use serde::{Deserialize, Serialize};

use super::config::Ansatz;
use crate::error::{Error, Result};
use crate::qstate::{GateKind, GateSpec, Mat2};

/// One gate whose angles are read from parameter slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Op {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<usize>,
    pub open_controls: Vec<usize>,
    pub slots: Vec<usize>,
}

impl Op {
    fn new(kind: GateKind, target: usize, slots: Vec<usize>) -> Self {
        debug_assert_eq!(slots.len(), kind.num_params());
        Op {
            kind,
            target,
            controls: Vec::new(),
            open_controls: Vec::new(),
            slots,
        }
    }

    fn controlled(kind: GateKind, controls: Vec<usize>, target: usize, slots: Vec<usize>) -> Self {
        Op {
            controls,
            ..Op::new(kind, target, slots)
        }
    }

    pub fn angles(&self, params: &[f64]) -> [f64; 3] {
        let mut a = [0.0; 3];
        for (dst, &s) in a.iter_mut().zip(&self.slots) {
            *dst = params[s];
        }
        a
    }

    pub fn matrix(&self, params: &[f64]) -> Mat2 {
        self.kind.base_matrix(&self.angles(params))
    }

    pub fn control_mask(&self) -> usize {
        self.controls.iter().fold(0, |m, &q| m | (1 << q))
    }

    pub fn open_control_mask(&self) -> usize {
        self.open_controls.iter().fold(0, |m, &q| m | (1 << q))
    }

    pub fn max_qubit(&self) -> usize {
        self.controls
            .iter()
            .chain(&self.open_controls)
            .fold(self.target, |m, &q| m.max(q))
    }

    /// Concrete gate with angles bound from `params`.
    pub fn bind(&self, params: &[f64]) -> GateSpec {
        GateSpec {
            kind: self.kind,
            targets: vec![self.target],
            controls: self.controls.clone(),
            open_controls: self.open_controls.clone(),
            params: self.slots.iter().map(|&s| params[s]).collect(),
        }
    }
}

fn slots(base: usize, range: std::ops::Range<usize>) -> Vec<usize> {
    range.map(|i| base + i).collect()
}

/// Ansatz 1 on (qa, qb), reading slots `base..base+15`.
pub fn conv_ansatz1(qa: usize, qb: usize, base: usize) -> Vec<Op> {
    debug_assert_ne!(qa, qb);
    vec![
        Op::new(GateKind::U3, qa, slots(base, 0..3)),
        Op::new(GateKind::U3, qb, slots(base, 3..6)),
        Op::controlled(GateKind::Cnot, vec![qa], qb, vec![]),
        Op::new(GateKind::Ry, qa, vec![base + 6]),
        Op::new(GateKind::Rz, qb, vec![base + 7]),
        Op::controlled(GateKind::Cnot, vec![qb], qa, vec![]),
        Op::new(GateKind::Ry, qa, vec![base + 8]),
        Op::controlled(GateKind::Cnot, vec![qa], qb, vec![]),
        Op::new(GateKind::U3, qa, slots(base, 9..12)),
        Op::new(GateKind::U3, qb, slots(base, 12..15)),
    ]
}

/// Ansatz 2 on (qa, qb), reading slots `base..base+10`.
///
/// Reading of the circuit drawing: Rx-Rz on both wires, controlled-Rx from
/// qb onto qa, controlled-Rx from qa onto qb, then Rx-Rz on both wires.
pub fn conv_ansatz2(qa: usize, qb: usize, base: usize) -> Vec<Op> {
    debug_assert_ne!(qa, qb);
    vec![
        Op::new(GateKind::Rx, qa, vec![base]),
        Op::new(GateKind::Rz, qa, vec![base + 1]),
        Op::new(GateKind::Rx, qb, vec![base + 5]),
        Op::new(GateKind::Rz, qb, vec![base + 6]),
        Op::controlled(GateKind::CRx, vec![qb], qa, vec![base + 2]),
        Op::controlled(GateKind::CRx, vec![qa], qb, vec![base + 7]),
        Op::new(GateKind::Rx, qa, vec![base + 3]),
        Op::new(GateKind::Rz, qa, vec![base + 4]),
        Op::new(GateKind::Rx, qb, vec![base + 8]),
        Op::new(GateKind::Rz, qb, vec![base + 9]),
    ]
}

pub fn conv_ansatz(ansatz: Ansatz, qa: usize, qb: usize, base: usize) -> Vec<Op> {
    match ansatz {
        Ansatz::A1 => conv_ansatz1(qa, qb, base),
        Ansatz::A2 => conv_ansatz2(qa, qb, base),
    }
}

/// Translationally invariant convolution over a ring of qubits.
///
/// The first rail covers (q0,q1), (q2,q3), ...; the second covers
/// (q1,q2), ..., (q_{m-1},q0). Every instance shares `base`.
pub fn conv_layer(qubits: &[usize], ansatz: Ansatz, base: usize) -> Result<Vec<Op>> {
    let m = qubits.len();
    if m < 4 || m % 2 == 1 {
        return Err(Error::Config(format!(
            "a convolutional layer needs an even ring of at least 4 qubits, got {m}"
        )));
    }
    let mut ops = Vec::new();
    for i in (0..m).step_by(2) {
        ops.extend(conv_ansatz(ansatz, qubits[i], qubits[i + 1], base));
    }
    for i in (1..m).step_by(2) {
        ops.extend(conv_ansatz(ansatz, qubits[i], qubits[(i + 1) % m], base));
    }
    Ok(ops)
}

/// Pool pairs (q_{2i}, q_{2i+1}) into q_{2i}. Returns the ops and the kept qubits.
///
/// Each block: CRz(slot base) from the dropped qubit onto the kept one, X on
/// the dropped qubit, then Rx(slot base+1) on the kept qubit conditioned on
/// the dropped qubit being |0>. Dropped qubits are never touched again.
pub fn pooling_layer(qubits: &[usize], base: usize) -> Result<(Vec<Op>, Vec<usize>)> {
    if qubits.is_empty() || qubits.len() % 2 == 1 {
        return Err(Error::Config(format!(
            "pooling needs an even number of qubits, got {}",
            qubits.len()
        )));
    }
    let mut ops = Vec::new();
    let mut kept = Vec::new();
    for pair in qubits.chunks_exact(2) {
        let (keep, drop) = (pair[0], pair[1]);
        ops.push(Op::controlled(GateKind::CRz, vec![drop], keep, vec![base]));
        ops.push(Op::new(GateKind::PauliX, drop, vec![]));
        ops.push(Op {
            open_controls: vec![drop],
            ..Op::new(GateKind::AntiControlledRx, keep, vec![base + 1])
        });
        kept.push(keep);
    }
    Ok((ops, kept))
}

fn expect_four(qubits: &[usize], what: &str) -> Result<[usize; 4]> {
    qubits.try_into().map_err(|_| {
        Error::Config(format!(
            "{what} acts on exactly 4 qubits, got {}",
            qubits.len()
        ))
    })
}

/// The four Toffolis of the first interaction layer, as
/// (control, control, target) indices into the four live qubits, application order.
const TOFFOLI_PATTERN: [(usize, usize, usize); 4] = [(1, 2, 3), (0, 3, 1), (0, 1, 2), (2, 3, 0)];

fn toffoli(q: &[usize; 4], idx: usize) -> Op {
    let (c1, c2, t) = TOFFOLI_PATTERN[idx];
    Op::controlled(GateKind::Toffoli, vec![q[c1], q[c2]], q[t], vec![])
}

/// Four Toffolis, no parameters: t234, t142, t123, t341 with the live qubits
/// numbered 1..4.
pub fn interaction_layer1(qubits: &[usize]) -> Result<Vec<Op>> {
    let q = expect_four(qubits, "interaction layer 1")?;
    Ok((0..4).map(|i| toffoli(&q, i)).collect())
}

/// Toffolis interleaved with trainable Rx, Ry, Rz rotations on all four qubits.
pub fn interaction_layer2(qubits: &[usize], base: usize) -> Result<Vec<Op>> {
    let q = expect_four(qubits, "interaction layer 2")?;
    let rotations = |kind: GateKind, offset: usize| -> Vec<Op> {
        (0..4)
            .map(|i| Op::new(kind, q[i], vec![base + offset + i]))
            .collect()
    };
    let mut ops = vec![toffoli(&q, 0), toffoli(&q, 1)];
    ops.extend(rotations(GateKind::Rx, 0));
    ops.push(toffoli(&q, 2));
    ops.extend(rotations(GateKind::Ry, 4));
    ops.push(toffoli(&q, 3));
    ops.extend(rotations(GateKind::Rz, 8));
    Ok(ops)
}

/// Live-qubit index feeding ancilla `i`: 1, 2, 3, 0, 1, ... (the second live
/// qubit feeds the first ancilla).
pub fn ancilla_link_source(i: usize) -> usize {
    (i + 1) % 4
}

/// CNOT ring over the data qubits, one CNOT link per ancilla, then Rz, Ry, Rx
/// on every ancilla. Ancilla `i` reads slots `base+3i .. base+3i+3`.
pub fn classifier_layer(data: &[usize], ancillas: &[usize], base: usize) -> Result<Vec<Op>> {
    let q = expect_four(data, "the classifier")?;
    if ancillas.len() < 2 {
        return Err(Error::Config(format!(
            "the classifier needs at least 2 ancillas, got {}",
            ancillas.len()
        )));
    }
    let cnot = |c: usize, t: usize| Op::controlled(GateKind::Cnot, vec![c], t, vec![]);
    let mut ops = vec![cnot(q[3], q[0]), cnot(q[0], q[1]), cnot(q[1], q[2]), cnot(q[2], q[3])];
    for (i, &a) in ancillas.iter().enumerate() {
        ops.push(cnot(q[ancilla_link_source(i)], a));
    }
    for (i, &a) in ancillas.iter().enumerate() {
        let s = base + 3 * i;
        ops.push(Op::new(GateKind::Rz, a, vec![s]));
        ops.push(Op::new(GateKind::Ry, a, vec![s + 1]));
        ops.push(Op::new(GateKind::Rx, a, vec![s + 2]));
    }
    Ok(ops)
}
