//! Hybrid training: softmax cross-entropy on the ancilla readout, circuit
//! gradients, Nesterov updates and multi-seed aggregation.

mod grad;
mod loss;
pub mod metrics;
mod optim;
mod run;

pub use grad::{
    adjoint_grad, finite_diff_grad, gradcheck, loss_gradient, parameter_shift_grad,
    parameter_shift_grad_with, parameter_shift_instrumented, GradMethod, GradcheckReport,
    InstanceContribution, ShiftRules, DEFAULT_FD_STEP,
};
pub use loss::{argmax, cross_entropy, loss_and_outputs, softmax, Example, PROB_FLOOR};
pub use optim::{lookahead, lr_at, nesterov_step, LrSchedule};
pub use run::{
    aggregate, evaluate, init_params, mean_std, multi_run, train_run, Aggregate, EvalRecord,
    Evaluation, RunMetrics, TrainConfig,
};
