//! Dense reference simulator for tests. It shares no code with the library's
//! kernels: gates are written out from their textbook formulas and embedded
//! as full 2^n x 2^n matrices by enumerating basis states.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use qcnn_core::circuit::Op;
use qcnn_core::GateKind;

pub type Dense = DMatrix<C>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn single(kind: GateKind, a: &[f64]) -> [[C; 2]; 2] {
    let half = |t: f64| (t / 2.0).sin_cos();
    match kind {
        GateKind::PauliX | GateKind::Cnot | GateKind::Toffoli => {
            [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
        }
        GateKind::Rx | GateKind::CRx | GateKind::AntiControlledRx => {
            let (s, co) = half(a[0]);
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        GateKind::Ry | GateKind::CRy => {
            let (s, co) = half(a[0]);
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        GateKind::Rz | GateKind::CRz => [
            [C::from_polar(1.0, -a[0] / 2.0), c(0.0, 0.0)],
            [c(0.0, 0.0), C::from_polar(1.0, a[0] / 2.0)],
        ],
        GateKind::U3 => {
            let (s, co) = half(a[0]);
            [
                [c(co, 0.0), -C::from_polar(s, a[2])],
                [C::from_polar(s, a[1]), C::from_polar(co, a[1] + a[2])],
            ]
        }
    }
}

/// Full matrix of a single-target gate with closed and open controls on `n`
/// qubits (qubit b is bit b of the index).
pub fn embed(n: usize, target: usize, controls: &[usize], open: &[usize], m: [[C; 2]; 2]) -> Dense {
    let dim = 1 << n;
    let mut u = Dense::zeros(dim, dim);
    for col in 0..dim {
        let fires = controls.iter().all(|&q| col >> q & 1 == 1) && open.iter().all(|&q| col >> q & 1 == 0);
        if !fires {
            u[(col, col)] = c(1.0, 0.0);
            continue;
        }
        let b = col >> target & 1;
        for (out, m_row) in m.iter().enumerate() {
            let row = (col & !(1 << target)) | (out << target);
            u[(row, col)] += m_row[b];
        }
    }
    u
}

pub fn op_matrix(n: usize, op: &Op, params: &[f64]) -> Dense {
    let a: Vec<f64> = op.slots.iter().map(|&s| params[s]).collect();
    embed(n, op.target, &op.controls, &op.open_controls, single(op.kind, &a))
}

/// Product of all op matrices, first op rightmost.
pub fn compose(n: usize, ops: &[Op], params: &[f64]) -> Dense {
    let mut u = Dense::identity(1 << n, 1 << n);
    for op in ops {
        u = op_matrix(n, op, params) * u;
    }
    u
}

pub fn z_expectation(psi: &DVector<C>, q: usize) -> f64 {
    psi.iter()
        .enumerate()
        .map(|(i, a)| if i >> q & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}

/// Product state of Ry(x_i) on qubit i, padded with |0> up to n qubits.
pub fn angle_state(features: &[f64], n: usize) -> DVector<C> {
    let mut psi = DVector::from_element(1 << n, c(0.0, 0.0));
    for (i, v) in psi.iter_mut().enumerate() {
        let mut amp = 1.0;
        for q in 0..n {
            let bit = i >> q & 1;
            amp *= match (q < features.len(), bit) {
                (true, 0) => (features[q] / 2.0).cos(),
                (true, _) => (features[q] / 2.0).sin(),
                (false, 0) => 1.0,
                (false, _) => 0.0,
            };
        }
        *v = c(amp, 0.0);
    }
    psi
}

/// Reduced density matrix on `keep` (bit b of the row index is keep[b]).
pub fn reduced(psi: &DVector<C>, n: usize, keep: &[usize]) -> Dense {
    let k = keep.len();
    let mut rho = Dense::zeros(1 << k, 1 << k);
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let compose_index = |kept: usize, env: usize| {
        let mut i = 0;
        for (b, &q) in keep.iter().enumerate() {
            i |= (kept >> b & 1) << q;
        }
        for (b, &q) in traced.iter().enumerate() {
            i |= (env >> b & 1) << q;
        }
        i
    };
    for env in 0..1 << traced.len() {
        for r in 0..1 << k {
            for s in 0..1 << k {
                rho[(r, s)] += psi[compose_index(r, env)] * psi[compose_index(s, env)].conj();
            }
        }
    }
    rho
}

pub fn is_unitary(u: &Dense, tol: f64) -> bool {
    let d = u.adjoint() * u;
    let id = Dense::identity(u.nrows(), u.ncols());
    (d - id).iter().all(|x| x.norm() <= tol)
}

pub fn softmax(x: &[f64]) -> Vec<f64> {
    let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}
