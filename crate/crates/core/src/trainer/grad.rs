//! Loss gradients with respect to the trainable angles.
//!
//! All engines differentiate the mean cross-entropy of a batch. The chain
//! rule through softmax gives `dL/d<Z_j> = (p_j - y_j) / B`, so per sample the
//! circuit only has to be differentiated for the weighted observable
//! `H = sum_j w_j Z_{ancilla_j}`.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::loss::{loss_and_outputs, sample_loss, Example};
use crate::circuit::{Op, Program, SlotGroup};
use crate::error::{Error, Result};
use crate::qstate::{dagger, kernel, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradMethod {
    /// Two-term rule for single-qubit rotations and U3 angles, four-term rule
    /// for controlled rotations.
    ParameterShift,
    /// Reverse-mode sweep over the statevector (one forward and one backward
    /// pass per sample).
    Adjoint,
    /// Central differences with step 1e-4.
    FiniteDifference,
}

pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Coefficients of the shift rules.
///
/// Kept as data so a test fixture can corrupt them and check that the
/// gradient check notices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftRules {
    /// `d f = c (f(+pi/2) - f(-pi/2))`
    pub two_term: f64,
    /// `d f = c1 (f(+pi/2) - f(-pi/2)) - c2 (f(+3pi/2) - f(-3pi/2))`
    pub four_term: (f64, f64),
}

impl Default for ShiftRules {
    fn default() -> Self {
        let s2 = std::f64::consts::SQRT_2;
        ShiftRules {
            two_term: 0.5,
            four_term: ((s2 + 1.0) / (4.0 * s2), (s2 - 1.0) / (4.0 * s2)),
        }
    }
}

impl ShiftRules {
    /// (shift, coefficient) pairs for a gate kind.
    fn terms(&self, controlled: bool) -> Vec<(f64, f64)> {
        if controlled {
            let (c1, c2) = self.four_term;
            vec![
                (FRAC_PI_2, c1),
                (-FRAC_PI_2, -c1),
                (3.0 * FRAC_PI_2, -c2),
                (-3.0 * FRAC_PI_2, c2),
            ]
        } else {
            vec![(FRAC_PI_2, self.two_term), (-FRAC_PI_2, -self.two_term)]
        }
    }
}

/// Contribution of one angle of one gate instance to a slot's gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceContribution {
    pub op_index: usize,
    pub position: usize,
    pub slot: usize,
    pub value: f64,
}

fn apply_op_raw(amps: &mut [C64], op: &Op, params: &[f64]) {
    kernel::apply(
        amps,
        op.target,
        op.control_mask(),
        op.open_control_mask(),
        &op.matrix(params),
    );
}

fn apply_op_angles(amps: &mut [C64], op: &Op, angles: &[f64; 3]) {
    kernel::apply(
        amps,
        op.target,
        op.control_mask(),
        op.open_control_mask(),
        &op.kind.base_matrix(angles),
    );
}

fn apply_op_dagger(amps: &mut [C64], op: &Op, params: &[f64]) {
    kernel::apply(
        amps,
        op.target,
        op.control_mask(),
        op.open_control_mask(),
        &dagger(&op.matrix(params)),
    );
}

/// `<H>` with H diagonal: sum over ancillas of weight * Z.
fn weighted_z(amps: &[C64], ancillas: &[usize], weights: &[f64]) -> f64 {
    ancillas
        .iter()
        .zip(weights)
        .map(|(&a, &w)| w * kernel::expectation_z(amps, a))
        .sum()
}

fn widen(amps: &mut Vec<C64>, program: &Program) {
    let total = program.config.total_qubits();
    amps.resize(1 << total, C64::new(0.0, 0.0));
}

/// Run ops `from..` starting from `amps` (sized for the register at `from`).
fn run_tail(program: &Program, params: &[f64], amps: &mut Vec<C64>, from: usize) {
    for (g, op) in program.ops.iter().enumerate().skip(from) {
        if g == program.ancilla_start {
            widen(amps, program);
        }
        apply_op_raw(amps, op, params);
    }
}

/// Per-sample forward pass: scores and loss weights `(p - y) / batch_len`.
fn sample_weights(scores: &[f64], label: usize, batch_len: usize) -> Result<(f64, Vec<f64>)> {
    let (loss, probs) = sample_loss(scores, label)?;
    let weights = probs
        .iter()
        .enumerate()
        .map(|(j, &p)| (p - f64::from(u8::from(j == label))) / batch_len as f64)
        .collect();
    Ok((loss, weights))
}

struct SampleGrad {
    loss: f64,
    grad: Vec<f64>,
    contributions: Vec<InstanceContribution>,
}

fn shift_sample(
    program: &Program,
    params: &[f64],
    example: Example<'_>,
    batch_len: usize,
    rules: &ShiftRules,
    record: bool,
) -> Result<SampleGrad> {
    let (features, label) = example;
    // states[g] is the register right before op g
    let mut states: Vec<Vec<C64>> = Vec::with_capacity(program.ops.len() + 1);
    let mut amps = program.encode(features)?.into_amplitudes();
    for (g, op) in program.ops.iter().enumerate() {
        if g == program.ancilla_start {
            widen(&mut amps, program);
        }
        states.push(amps.clone());
        apply_op_raw(&mut amps, op, params);
    }
    let scores: Vec<f64> = program
        .ancillas
        .iter()
        .map(|&a| kernel::expectation_z(&amps, a))
        .collect();
    let (loss, weights) = sample_weights(&scores, label, batch_len)?;

    let mut grad = vec![0.0; params.len()];
    let mut contributions = Vec::new();
    for (g, op) in program.ops.iter().enumerate() {
        if op.slots.is_empty() {
            continue;
        }
        let base_angles = op.angles(params);
        for (position, &slot) in op.slots.iter().enumerate() {
            let mut value = 0.0;
            for (shift, coeff) in rules.terms(op.kind.is_controlled()) {
                let mut angles = base_angles;
                angles[position] += shift;
                let mut shifted = states[g].clone();
                apply_op_angles(&mut shifted, op, &angles);
                run_tail(program, params, &mut shifted, g + 1);
                value += coeff * weighted_z(&shifted, &program.ancillas, &weights);
            }
            grad[slot] += value;
            if record {
                contributions.push(InstanceContribution {
                    op_index: g,
                    position,
                    slot,
                    value,
                });
            }
        }
    }
    Ok(SampleGrad {
        loss: loss / batch_len as f64,
        grad,
        contributions,
    })
}

fn adjoint_sample(
    program: &Program,
    params: &[f64],
    example: Example<'_>,
    batch_len: usize,
) -> Result<SampleGrad> {
    let (features, label) = example;
    let mut phi = program.encode(features)?.into_amplitudes();
    run_tail(program, params, &mut phi, 0);
    let scores: Vec<f64> = program
        .ancillas
        .iter()
        .map(|&a| kernel::expectation_z(&phi, a))
        .collect();
    let (loss, weights) = sample_weights(&scores, label, batch_len)?;

    // lambda = H phi
    let mut lambda: Vec<C64> = phi
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let h: f64 = program
                .ancillas
                .iter()
                .zip(&weights)
                .map(|(&q, &w)| if (i >> q) & 1 == 0 { w } else { -w })
                .sum();
            a * h
        })
        .collect();

    let data_len = 1usize << program.config.data_qubits;
    let mut grad = vec![0.0; params.len()];
    let mut mu = Vec::with_capacity(phi.len());
    for (g, op) in program.ops.iter().enumerate().rev() {
        apply_op_dagger(&mut phi, op, params);
        if !op.slots.is_empty() {
            let angles = op.angles(params);
            for (position, &slot) in op.slots.iter().enumerate() {
                let d = op.kind.base_derivative(&angles, position);
                mu.clear();
                mu.extend_from_slice(&phi);
                kernel::apply_projected(
                    &mut mu,
                    op.target,
                    op.control_mask(),
                    op.open_control_mask(),
                    &d,
                );
                grad[slot] += 2.0 * kernel::real_inner(&lambda, &mu);
            }
        }
        apply_op_dagger(&mut lambda, op, params);
        if g == program.ancilla_start {
            // Before the classifier the ancillas are |0>, and only that block of
            // lambda can pair with data-register derivatives.
            phi.truncate(data_len);
            lambda.truncate(data_len);
        }
    }
    Ok(SampleGrad {
        loss: loss / batch_len as f64,
        grad,
        contributions: Vec::new(),
    })
}

fn check_batch(program: &Program, params: &[f64], batch: &[Example<'_>]) -> Result<()> {
    program.check_params(params)?;
    if batch.is_empty() {
        return Err(Error::Usage("empty batch".into()));
    }
    Ok(())
}

/// Sum per-sample results in batch order.
fn reduce(parts: Vec<SampleGrad>, n: usize) -> (f64, Vec<f64>, Vec<InstanceContribution>) {
    let mut loss = 0.0;
    let mut grad = vec![0.0; n];
    let mut contributions = Vec::new();
    for p in parts {
        loss += p.loss;
        for (g, x) in grad.iter_mut().zip(&p.grad) {
            *g += x;
        }
        contributions.extend(p.contributions);
    }
    (loss, grad, contributions)
}

/// Parameter-shift gradient of the mean batch loss. Returns (loss, gradient).
pub fn parameter_shift_grad(
    program: &Program,
    params: &[f64],
    batch: &[Example<'_>],
) -> Result<(f64, Vec<f64>)> {
    parameter_shift_grad_with(program, params, batch, &ShiftRules::default())
}

pub fn parameter_shift_grad_with(
    program: &Program,
    params: &[f64],
    batch: &[Example<'_>],
    rules: &ShiftRules,
) -> Result<(f64, Vec<f64>)> {
    let (loss, grad, _) = shift_impl(program, params, batch, rules, false)?;
    Ok((loss, grad))
}

/// Parameter-shift gradient that also reports the contribution of every
/// gate-instance angle. Summing the contributions per slot gives the gradient.
pub fn parameter_shift_instrumented(
    program: &Program,
    params: &[f64],
    batch: &[Example<'_>],
) -> Result<(Vec<f64>, Vec<InstanceContribution>)> {
    let (_, grad, contributions) = shift_impl(program, params, batch, &ShiftRules::default(), true)?;
    Ok((grad, contributions))
}

fn shift_impl(
    program: &Program,
    params: &[f64],
    batch: &[Example<'_>],
    rules: &ShiftRules,
    record: bool,
) -> Result<(f64, Vec<f64>, Vec<InstanceContribution>)> {
    check_batch(program, params, batch)?;
    let parts = batch
        .par_iter()
        .map(|&ex| shift_sample(program, params, ex, batch.len(), rules, record))
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce(parts, params.len()))
}

/// Adjoint-method gradient of the mean batch loss. Returns (loss, gradient).
pub fn adjoint_grad(
    program: &Program,
    params: &[f64],
    batch: &[Example<'_>],
) -> Result<(f64, Vec<f64>)> {
    check_batch(program, params, batch)?;
    let parts = batch
        .par_iter()
        .map(|&ex| adjoint_sample(program, params, ex, batch.len()))
        .collect::<Result<Vec<_>>>()?;
    let (loss, grad, _) = reduce(parts, params.len());
    Ok((loss, grad))
}

/// Central finite differences `(L(x+h) - L(x-h)) / 2h` on every coordinate.
pub fn finite_diff_grad(
    program: &Program,
    params: &[f64],
    batch: &[Example<'_>],
    h: f64,
) -> Result<(f64, Vec<f64>)> {
    check_batch(program, params, batch)?;
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Usage(format!("finite-difference step must be > 0, got {h}")));
    }
    let loss = loss_and_outputs(program, params, batch)?.0;
    let grad = (0..params.len())
        .into_par_iter()
        .map(|i| {
            let mut p = params.to_vec();
            p[i] = params[i] + h;
            let up = loss_and_outputs(program, &p, batch)?.0;
            p[i] = params[i] - h;
            let down = loss_and_outputs(program, &p, batch)?.0;
            Ok((up - down) / (2.0 * h))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((loss, grad))
}

pub fn loss_gradient(
    program: &Program,
    params: &[f64],
    batch: &[Example<'_>],
    method: GradMethod,
) -> Result<(f64, Vec<f64>)> {
    match method {
        GradMethod::ParameterShift => parameter_shift_grad(program, params, batch),
        GradMethod::Adjoint => adjoint_grad(program, params, batch),
        GradMethod::FiniteDifference => finite_diff_grad(program, params, batch, DEFAULT_FD_STEP),
    }
}

/// Largest |parameter-shift - finite difference| per slot group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradcheckReport {
    pub tolerance: f64,
    pub step: f64,
    pub groups: Vec<(SlotGroup, f64)>,
    pub max_abs_diff: f64,
    pub worst_slot: usize,
}

impl GradcheckReport {
    pub fn passed(&self) -> bool {
        self.max_abs_diff <= self.tolerance
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "gradient check: parameter shift vs central differences (h={:e}, tol={:e})\n",
            self.step, self.tolerance
        );
        for (g, d) in &self.groups {
            s.push_str(&format!("  {:<12} max |diff| = {:.3e}\n", g.to_string(), d));
        }
        s.push_str(&format!(
            "  overall      max |diff| = {:.3e} (slot {}) -> {}\n",
            self.max_abs_diff,
            self.worst_slot,
            if self.passed() { "PASS" } else { "FAIL" }
        ));
        s
    }
}

pub fn gradcheck(
    program: &Program,
    params: &[f64],
    batch: &[Example<'_>],
    rules: &ShiftRules,
    step: f64,
    tolerance: f64,
) -> Result<GradcheckReport> {
    let (_, shift) = parameter_shift_grad_with(program, params, batch, rules)?;
    let (_, fd) = finite_diff_grad(program, params, batch, step)?;
    let diffs: Vec<f64> = shift.iter().zip(&fd).map(|(a, b)| (a - b).abs()).collect();
    let groups = program
        .layout
        .groups()
        .iter()
        .map(|(g, r)| (*g, diffs[r.clone()].iter().copied().fold(0.0, f64::max)))
        .collect();
    let (worst_slot, max_abs_diff) = diffs
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
    Ok(GradcheckReport {
        tolerance,
        step,
        groups,
        max_abs_diff,
        worst_slot,
    })
}
