mod common;

use common::{c, embed, is_unitary, single, Dense};
use proptest::prelude::*;
use qcnn_core::qstate::{gate_matrix, init_zero_state, C64};
use qcnn_core::{GateKind, GateSpec, StateVector};

fn register_matrix(n: usize, gate: &GateSpec) -> Dense {
    let dim = 1 << n;
    let mut u = Dense::zeros(dim, dim);
    for col in 0..dim {
        let mut s = StateVector::basis(n, col).unwrap();
        s.apply_gate(gate).unwrap();
        for (row, a) in s.amplitudes().iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    u
}

fn close(a: &Dense, b: &Dense, tol: f64) -> bool {
    a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= tol)
}

fn literal(rows: &[&[C64]]) -> Dense {
    Dense::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
}

fn sample_gate(kind: GateKind, a: [f64; 3]) -> GateSpec {
    let qubits: &[usize] = match kind.num_controls() + kind.num_open_controls() {
        0 => &[0],
        1 => &[0, 1],
        _ => &[0, 1, 2],
    };
    GateSpec::with_kind(kind, qubits, &a[..kind.num_params()])
}

#[test]
fn every_catalogue_matrix_is_unitary() {
    let angles = [-3.1, -1.0, -0.2, 0.0, 0.7, 1.9, 3.0, 5.0];
    for kind in GateKind::ALL {
        for (i, &t) in angles.iter().enumerate() {
            let a = [t, angles[(i + 3) % angles.len()], angles[(i + 5) % angles.len()]];
            let m = gate_matrix(&sample_gate(kind, a));
            assert!(is_unitary(&m, 1e-12), "{kind:?} at {a:?}");
        }
    }
}

#[test]
fn printed_matrices_match_the_register_action() {
    let t: f64 = 0.83;
    let (s, co) = (t / 2.0).sin_cos();
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    let cs = c(co, 0.0);
    // printed CRx / CRy: control is bit 0, target bit 1 of the 2-qubit index
    let crx = literal(&[
        &[l, o, o, o],
        &[o, cs, o, c(0.0, -s)],
        &[o, o, l, o],
        &[o, c(0.0, -s), o, cs],
    ]);
    assert!(close(&register_matrix(2, &GateSpec::crx(0, 1, t)), &crx, 1e-15));
    let cry = literal(&[
        &[l, o, o, o],
        &[o, cs, o, c(-s, 0.0)],
        &[o, o, l, o],
        &[o, c(s, 0.0), o, cs],
    ]);
    assert!(close(&register_matrix(2, &GateSpec::cry(0, 1, t)), &cry, 1e-15));
    // printed CNOT and Toffoli: controls are the high bits, target bit 0
    let cnot = literal(&[&[l, o, o, o], &[o, l, o, o], &[o, o, o, l], &[o, o, l, o]]);
    assert!(close(&register_matrix(2, &GateSpec::cnot(1, 0)), &cnot, 0.0));
    let mut toff = Dense::identity(8, 8);
    toff.swap_rows(6, 7);
    assert!(close(&register_matrix(3, &GateSpec::toffoli(1, 2, 0)), &toff, 0.0));
    // gate_matrix uses [controls, target] with the first qubit most significant
    assert!(close(&gate_matrix(&GateSpec::cnot(0, 1)), &cnot, 0.0));
    assert!(close(&gate_matrix(&GateSpec::toffoli(0, 1, 2)), &toff, 0.0));

    let rz = literal(&[&[C64::from_polar(1.0, -t / 2.0), o], &[o, C64::from_polar(1.0, t / 2.0)]]);
    assert!(close(&gate_matrix(&GateSpec::rz(0, t)), &rz, 1e-15));
    let (a2, a3) = (0.4, -1.3);
    let u3 = literal(&[
        &[cs, -C64::from_polar(s, a3)],
        &[C64::from_polar(s, a2), C64::from_polar(co, a2 + a3)],
    ]);
    assert!(close(&gate_matrix(&GateSpec::u3(0, t, a2, a3)), &u3, 1e-15));
}

#[test]
fn toffoli_truth_table_on_every_qubit_assignment() {
    let n = 4;
    for c1 in 0..n {
        for c2 in 0..n {
            for t in 0..n {
                if c1 == c2 || c1 == t || c2 == t {
                    continue;
                }
                for i in 0..1 << n {
                    let mut s = StateVector::basis(n, i).unwrap();
                    s.apply_gate(&GateSpec::toffoli(c1, c2, t)).unwrap();
                    let flip = (i >> c1 & 1) & (i >> c2 & 1);
                    let want = i ^ (flip << t);
                    assert_eq!(s.probabilities()[want], 1.0, "t{c1}{c2}{t} on {i:04b}");
                }
            }
        }
    }
}

#[test]
fn cnot_truth_table_on_every_qubit_assignment() {
    let n = 3;
    for ctl in 0..n {
        for t in 0..n {
            if ctl == t {
                continue;
            }
            for i in 0..1 << n {
                let mut s = StateVector::basis(n, i).unwrap();
                s.apply_gate(&GateSpec::cnot(ctl, t)).unwrap();
                let want = i ^ ((i >> ctl & 1) << t);
                assert_eq!(s.probabilities()[want], 1.0);
            }
        }
    }
}

#[test]
fn anti_controlled_rx_fires_on_zero() {
    let t = 1.1;
    let m = register_matrix(2, &GateSpec::anti_crx(0, 1, t));
    let want = embed(2, 1, &[], &[0], single(GateKind::Rx, &[t]));
    assert!(close(&m, &want, 1e-15));
    // control |1>: identity on the target
    assert_eq!(m[(1, 1)], c(1.0, 0.0));
    assert_eq!(m[(3, 3)], c(1.0, 0.0));
}

fn random_state(n: usize, raw: &[f64]) -> StateVector {
    let amps: Vec<C64> = raw.chunks(2).take(1 << n).map(|p| c(p[0], p[1])).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn arb_gate(n: usize) -> impl Strategy<Value = GateSpec> {
    (
        proptest::sample::select(GateKind::ALL.to_vec()),
        Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        proptest::array::uniform3(-6.3f64..6.3),
    )
        .prop_map(|(kind, qubits, a)| {
            let arity = 1 + kind.num_controls() + kind.num_open_controls();
            GateSpec::with_kind(kind, &qubits[..arity], &a[..kind.num_params()])
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bitmask_application_equals_dense_embedding(
        gate in arb_gate(4),
        raw in proptest::collection::vec(0.05f64..1.0, 32),
    ) {
        let n = 4;
        let psi = random_state(n, &raw);
        let mut fast = psi.clone();
        fast.apply_gate(&gate).unwrap();
        let u = embed(n, gate.targets[0], &gate.controls, &gate.open_controls, single(gate.kind, &gate.params));
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let slow = u * v;
        for (a, b) in fast.amplitudes().iter().zip(slow.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn gates_preserve_norm(
        gate in arb_gate(5),
        raw in proptest::collection::vec(0.05f64..1.0, 64),
    ) {
        let mut s = random_state(5, &raw);
        s.apply_gate(&gate).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gates_leave_other_qubits_marginals_alone(
        gate in arb_gate(4),
        raw in proptest::collection::vec(0.05f64..1.0, 32),
    ) {
        // a gate can only change the Z statistics of its target
        let before = random_state(4, &raw);
        let mut after = before.clone();
        after.apply_gate(&gate).unwrap();
        for q in (0..4).filter(|&q| q != gate.targets[0]) {
            prop_assert!((before.expectation_z(q).unwrap() - after.expectation_z(q).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn zero_state_is_a_unit_basis_vector() {
    for n in 1..=10 {
        let s = init_zero_state(n).unwrap();
        assert_eq!(s.amplitudes().len(), 1 << n);
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        assert_eq!(s.norm(), 1.0);
    }
}
