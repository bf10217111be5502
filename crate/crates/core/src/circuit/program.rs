use std::fmt::Write as _;
use std::ops::Range;

use super::config::{Encoding, NetworkConfig};
use super::layers::{self, Op};
use super::layout::{ParamLayout, SlotGroup};
use crate::error::{Error, Result};
use crate::qstate::{init_zero_state, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layer {
    Conv1,
    Pool,
    Interaction1,
    Conv2,
    Interaction2,
    /// CNOT entangling into the ancillas.
    Interaction3,
    /// Terminal rotations on the ancillas.
    AncillaRotations,
}

impl Layer {
    pub fn name(self) -> &'static str {
        match self {
            Layer::Conv1 => "conv1",
            Layer::Pool => "pool",
            Layer::Interaction1 => "interaction1",
            Layer::Conv2 => "conv2",
            Layer::Interaction2 => "interaction2",
            Layer::Interaction3 => "interaction3",
            Layer::AncillaRotations => "ancilla_rotations",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub layer: Layer,
    pub ops: Range<usize>,
}

/// The trainable part of the network as an ordered gate list.
///
/// Data qubits are `0..data_qubits`, ancillas follow. Ops before
/// `ancilla_start` only touch data qubits, so they can run on the smaller
/// data register before the ancillas are tensored on.
#[derive(Clone, Debug)]
pub struct Program {
    pub config: NetworkConfig,
    pub layout: ParamLayout,
    pub ops: Vec<Op>,
    pub segments: Vec<Segment>,
    pub ancilla_start: usize,
    pub ancillas: Vec<usize>,
}

struct Builder {
    ops: Vec<Op>,
    segments: Vec<Segment>,
}

impl Builder {
    fn push(&mut self, layer: Layer, ops: Vec<Op>) {
        let start = self.ops.len();
        self.ops.extend(ops);
        self.segments.push(Segment {
            layer,
            ops: start..self.ops.len(),
        });
    }
}

impl Program {
    pub fn build(config: &NetworkConfig) -> Result<Self> {
        let layout = ParamLayout::for_config(config)?;
        let base = |g: SlotGroup| layout.range(g).map(|r| r.start);
        let mut b = Builder {
            ops: Vec::new(),
            segments: Vec::new(),
        };
        let ring: Vec<usize> = (0..config.data_qubits).collect();
        let conv1 = base(SlotGroup::Conv1).expect("conv1 group");

        let conv_stage = |b: &mut Builder, layer: Layer, qubits: &[usize], slot: usize| {
            let mut ops = Vec::new();
            for _ in 0..config.conv_repeats_per_stage {
                ops.extend(layers::conv_layer(qubits, config.ansatz, slot)?);
            }
            b.push(layer, ops);
            Ok::<_, Error>(())
        };

        let live = if config.iris_variant {
            conv_stage(&mut b, Layer::Conv1, &ring, conv1)?;
            if config.interaction_layers_enabled {
                b.push(Layer::Interaction1, layers::interaction_layer1(&ring)?);
                let il2 = base(SlotGroup::Il2).expect("il2 group");
                b.push(Layer::Interaction2, layers::interaction_layer2(&ring, il2)?);
            }
            ring
        } else {
            conv_stage(&mut b, Layer::Conv1, &ring, conv1)?;
            let (pool_ops, kept) =
                layers::pooling_layer(&ring, base(SlotGroup::Pool).expect("pool group"))?;
            b.push(Layer::Pool, pool_ops);
            if config.interaction_layers_enabled {
                b.push(Layer::Interaction1, layers::interaction_layer1(&kept)?);
            }
            conv_stage(
                &mut b,
                Layer::Conv2,
                &kept,
                base(SlotGroup::Conv2).expect("conv2 group"),
            )?;
            if config.interaction_layers_enabled {
                let il2 = base(SlotGroup::Il2).expect("il2 group");
                b.push(Layer::Interaction2, layers::interaction_layer2(&kept, il2)?);
            }
            kept
        };

        let ancillas: Vec<usize> = (config.data_qubits..config.total_qubits()).collect();
        let ancilla_start = b.ops.len();
        let classifier = layers::classifier_layer(
            &live,
            &ancillas,
            base(SlotGroup::Classifier).expect("classifier group"),
        )?;
        let n_cnots = 4 + ancillas.len();
        let mut classifier = classifier.into_iter();
        b.push(Layer::Interaction3, classifier.by_ref().take(n_cnots).collect());
        b.push(Layer::AncillaRotations, classifier.collect());

        Ok(Program {
            config: config.clone(),
            layout,
            ops: b.ops,
            segments: b.segments,
            ancilla_start,
            ancillas,
        })
    }

    pub fn num_params(&self) -> usize {
        self.layout.len()
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params() {
            return Err(Error::Usage(format!(
                "network has {} parameters, got {}",
                self.num_params(),
                params.len()
            )));
        }
        Ok(())
    }

    /// Encoded data register, before any trainable gate.
    pub fn encode(&self, features: &[f64]) -> Result<StateVector> {
        let n = self.config.data_qubits;
        let mut state = init_zero_state(n)?;
        match self.config.encoding {
            Encoding::Amplitude => state.set_amplitudes(features)?,
            Encoding::Angle => angle_encode(&mut state, features, &(0..n).collect::<Vec<_>>())?,
        }
        Ok(state)
    }

    /// Run the full circuit and return the final state on all qubits.
    pub fn final_state(&self, params: &[f64], features: &[f64]) -> Result<StateVector> {
        self.check_params(params)?;
        let mut state = self.encode(features)?;
        for op in &self.ops[..self.ancilla_start] {
            apply_op(&mut state, op, params);
        }
        state.extend_with_zero_qubits(self.ancillas.len())?;
        for op in &self.ops[self.ancilla_start..] {
            apply_op(&mut state, op, params);
        }
        Ok(state)
    }

    /// Pauli-Z expectation on each ancilla, in ancilla order.
    pub fn forward(&self, params: &[f64], features: &[f64]) -> Result<Vec<f64>> {
        let state = self.final_state(params, features)?;
        self.readout(&state)
    }

    pub fn readout(&self, state: &StateVector) -> Result<Vec<f64>> {
        self.ancillas
            .iter()
            .map(|&a| state.expectation_z(a))
            .collect()
    }

    pub fn segment_of(&self, op_index: usize) -> Option<Layer> {
        self.segments
            .iter()
            .find(|s| s.ops.contains(&op_index))
            .map(|s| s.layer)
    }

    /// Deterministic text listing: one gate per line, then the per-layer
    /// parameter table.
    pub fn describe(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# network: encoding={} ansatz={} data_qubits={} classes={} conv_repeats={} interaction_layers={} iris_variant={}",
            c.encoding,
            c.ansatz.number(),
            c.data_qubits,
            c.num_classes,
            c.conv_repeats_per_stage,
            if c.interaction_layers_enabled { "on" } else { "off" },
            c.iris_variant,
        );
        let _ = writeln!(
            out,
            "# qubits: data q0..q{}, ancillas q{}..q{}; qubit b is bit b of the basis index",
            c.data_qubits - 1,
            c.data_qubits,
            c.total_qubits() - 1
        );
        match c.encoding {
            Encoding::Amplitude => {
                let _ = writeln!(out, "[encoding] amplitude q0..q{}", c.data_qubits - 1);
            }
            Encoding::Angle => {
                let _ = writeln!(out, "[encoding] angle RY(x_i) on q_i, i=0..{}", c.data_qubits - 1);
            }
        }
        for seg in &self.segments {
            let _ = writeln!(out, "[{}]", seg.layer.name());
            for op in &self.ops[seg.ops.clone()] {
                let _ = writeln!(out, "{}", format_op(op));
            }
        }
        let _ = writeln!(out, "[measure] Z on q{}..q{}", c.data_qubits, c.total_qubits() - 1);
        out.push('\n');
        out.push_str(&self.parameter_table());
        out
    }

    /// Layer-by-layer qubit and parameter accounting.
    pub fn parameter_table(&self) -> String {
        let c = &self.config;
        let group_len = |g: SlotGroup| self.layout.range(g).map_or(0, |r| r.len());
        let ansatz = c.ansatz.number();
        let kept = if c.iris_variant { c.data_qubits } else { c.data_qubits / 2 };
        let mut rows: Vec<(String, String, usize)> = vec![(
            format!("Encoding ({})", c.encoding),
            format!("{} qubits", c.data_qubits),
            0,
        )];
        rows.push((
            format!("Quantum Conv. Layer 1 (ansatz {ansatz})"),
            format!("{} qubits", c.data_qubits),
            group_len(SlotGroup::Conv1),
        ));
        if !c.iris_variant {
            rows.push(("Pooling".into(), format!("{kept} qubits"), group_len(SlotGroup::Pool)));
        }
        if c.interaction_layers_enabled {
            rows.push(("Interaction Layer 1".into(), format!("{kept} qubits"), 0));
        }
        if !c.iris_variant {
            rows.push((
                format!("Quantum Conv. Layer 2 (ansatz {ansatz})"),
                format!("{kept} qubits"),
                group_len(SlotGroup::Conv2),
            ));
        }
        if c.interaction_layers_enabled {
            rows.push((
                "Interaction Layer 2".into(),
                format!("{kept} qubits"),
                group_len(SlotGroup::Il2),
            ));
        }
        rows.push((
            "Interaction Layer 3".into(),
            format!("{kept} qubits + {} qubits", c.num_classes),
            group_len(SlotGroup::Classifier),
        ));
        rows.push(("Measurement".into(), format!("{} qubits", c.num_classes), 0));
        let mut out = String::new();
        let _ = writeln!(out, "{:<36} {:<22} {:>6}", "operation", "processing size", "params");
        for (name, size, n) in rows {
            let _ = writeln!(out, "{name:<36} {size:<22} {n:>6}");
        }
        let _ = writeln!(out, "{:<36} {:<22} {:>6}", "Total Parameters", "-", self.num_params());
        out
    }
}

fn format_op(op: &Op) -> String {
    let mut s = format!("{:<8} t=q{}", op.kind.to_string(), op.target);
    if !op.controls.is_empty() {
        let c: Vec<String> = op.controls.iter().map(|q| format!("q{q}")).collect();
        let _ = write!(s, " c={}", c.join(","));
    }
    if !op.open_controls.is_empty() {
        let c: Vec<String> = op.open_controls.iter().map(|q| format!("q{q}")).collect();
        let _ = write!(s, " o={}", c.join(","));
    }
    if !op.slots.is_empty() {
        let p: Vec<String> = op.slots.iter().map(|s| s.to_string()).collect();
        let _ = write!(s, " slots={}", p.join(","));
    }
    s
}

pub(crate) fn apply_op(state: &mut StateVector, op: &Op, params: &[f64]) {
    debug_assert!(op.max_qubit() < state.num_qubits());
    state.apply_matrix(
        op.target,
        op.control_mask(),
        op.open_control_mask(),
        &op.matrix(params),
    );
}

/// Ry(x_i) on `qubits[i]` for every feature.
pub fn angle_encode(state: &mut StateVector, features: &[f64], qubits: &[usize]) -> Result<()> {
    if features.len() != qubits.len() {
        return Err(Error::Encoding(format!(
            "{} features for {} qubits",
            features.len(),
            qubits.len()
        )));
    }
    if let Some(x) = features.iter().find(|x| !x.is_finite()) {
        return Err(Error::Encoding(format!("non-finite feature {x}")));
    }
    for (&x, &q) in features.iter().zip(qubits) {
        state.apply_gate(&crate::qstate::GateSpec::ry(q, x))?;
    }
    Ok(())
}

/// Convenience: build the program for `config` and run one forward pass.
pub fn build_forward(config: &NetworkConfig, params: &[f64], features: &[f64]) -> Result<Vec<f64>> {
    let program = Program::build(config)?;
    if features.len() != config.input_len() {
        return Err(Error::Encoding(format!(
            "expected {} features, got {}",
            config.input_len(),
            features.len()
        )));
    }
    program.forward(params, features)
}
