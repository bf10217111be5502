use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grad::{loss_gradient, GradMethod};
use super::loss::{argmax, sample_loss, Example};
use super::optim::{lookahead, lr_at, nesterov_step, LrSchedule};
use crate::circuit::{NetworkConfig, Program};
use crate::datapipe::Dataset;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub iterations: usize,
    pub batch_size: usize,
    pub lr_initial: f64,
    pub lr_schedule: LrSchedule,
    pub momentum: f64,
    /// Test-set evaluation period in iterations.
    pub eval_every: usize,
    pub seeds: Vec<u64>,
    #[serde(default = "adjoint")]
    pub grad_method: GradMethod,
    /// Keep the parameter vector after every iteration.
    #[serde(default)]
    pub record_trajectory: bool,
}

fn adjoint() -> GradMethod {
    GradMethod::Adjoint
}

impl TrainConfig {
    /// Eight-qubit two-class runs.
    pub fn binary() -> Self {
        TrainConfig {
            iterations: 1000,
            batch_size: 50,
            lr_initial: 0.05,
            lr_schedule: LrSchedule::HalveAt50And100,
            momentum: 0.9,
            eval_every: 10,
            seeds: (0..10).collect(),
            grad_method: GradMethod::Adjoint,
            record_trajectory: false,
        }
    }

    pub fn multiclass() -> Self {
        TrainConfig {
            batch_size: 100,
            lr_schedule: LrSchedule::DropTo0p01At50,
            ..Self::binary()
        }
    }

    pub fn iris() -> Self {
        TrainConfig {
            lr_initial: 0.005,
            lr_schedule: LrSchedule::Constant,
            ..Self::binary()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        if !(self.lr_initial > 0.0 && self.lr_initial.is_finite()) {
            return Err(Error::Config(format!("lr_initial must be > 0, got {}", self.lr_initial)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.eval_every == 0 {
            return Err(Error::Config("eval_every must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must not be empty".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    /// Number of completed updates.
    pub iteration: usize,
    pub test_loss: f64,
    pub test_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub loss: f64,
    pub accuracy: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
}

/// Everything one seeded run produces. Contains no timing, so equal seeds give
/// equal values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub seed: u64,
    /// `train_loss[k]` is the batch loss seen by update `k + 1`.
    pub train_loss: Vec<f64>,
    /// Before training, every `eval_every` updates, and after the last one.
    pub evals: Vec<EvalRecord>,
    /// Mean loss over the full training split before and after training.
    pub initial_train_loss: f64,
    pub final_train_loss: f64,
    pub final_accuracy: f64,
    pub best_accuracy: f64,
    pub final_confusion: Vec<Vec<usize>>,
    pub final_params: Vec<f64>,
    /// `trajectory[k]` holds the parameters after `k` updates.
    pub trajectory: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub runs: Vec<RunMetrics>,
    pub mean_accuracy: f64,
    /// Sample standard deviation (n - 1).
    pub std_accuracy: f64,
    pub mean_best_accuracy: f64,
    pub best_run_accuracy: f64,
}

fn examples(ds: &Dataset) -> Vec<Example<'_>> {
    ds.samples
        .iter()
        .zip(&ds.labels)
        .map(|(x, &y)| (x.as_slice(), y))
        .collect()
}

fn check_dataset(program: &Program, ds: &Dataset, what: &str) -> Result<()> {
    if ds.is_empty() {
        return Err(Error::Usage(format!("{what} set is empty")));
    }
    let want = program.config.input_len();
    if let Some(bad) = ds.samples.iter().position(|s| s.len() != want) {
        return Err(Error::Encoding(format!(
            "{what} sample {bad} has {} features, network expects {want}",
            ds.samples[bad].len()
        )));
    }
    if ds.num_classes > program.config.num_classes {
        return Err(Error::Usage(format!(
            "{what} set has {} classes, network has {}",
            ds.num_classes, program.config.num_classes
        )));
    }
    Ok(())
}

/// Mean loss, accuracy (argmax vs label) and confusion counts over a dataset.
pub fn evaluate(program: &Program, params: &[f64], ds: &Dataset) -> Result<Evaluation> {
    program.check_params(params)?;
    check_dataset(program, ds, "evaluation")?;
    let per_sample = examples(ds)
        .par_iter()
        .map(|&(x, y)| {
            let scores = program.forward(params, x)?;
            let (loss, probs) = sample_loss(&scores, y)?;
            Ok((loss, argmax(&probs)))
        })
        .collect::<Result<Vec<_>>>()?;
    let k = program.config.num_classes;
    let mut confusion = vec![vec![0; k]; k];
    let mut loss = 0.0;
    let mut correct = 0usize;
    for ((l, pred), &y) in per_sample.into_iter().zip(&ds.labels) {
        loss += l;
        confusion[y][pred] += 1;
        correct += usize::from(pred == y);
    }
    Ok(Evaluation {
        loss: loss / ds.len() as f64,
        accuracy: correct as f64 / ds.len() as f64,
        confusion,
    })
}

/// N(0, 1) initial parameters from the run's generator.
pub fn init_params(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// One seeded training run.
///
/// The generator is ChaCha8 seeded with `seed`; it draws the initial
/// parameters first, then `batch_size` indices (with replacement) per update.
pub fn train_run(
    net: &NetworkConfig,
    train: &TrainConfig,
    train_ds: &Dataset,
    test_ds: &Dataset,
    seed: u64,
) -> Result<RunMetrics> {
    train.validate()?;
    let program = Program::build(net)?;
    check_dataset(&program, train_ds, "training")?;
    check_dataset(&program, test_ds, "test")?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = init_params(&mut rng, program.num_params());
    let mut velocity = vec![0.0; params.len()];
    let train_examples = examples(train_ds);

    let initial_train_loss = evaluate(&program, &params, train_ds)?.loss;
    let first = evaluate(&program, &params, test_ds)?;
    let mut evals = vec![EvalRecord {
        iteration: 0,
        test_loss: first.loss,
        test_accuracy: first.accuracy,
    }];
    let mut last_eval = first;
    let mut train_loss = Vec::with_capacity(train.iterations);
    let mut trajectory = train.record_trajectory.then(|| vec![params.clone()]);

    let mut batch = Vec::with_capacity(train.batch_size);
    for it in 0..train.iterations {
        batch.clear();
        for _ in 0..train.batch_size {
            batch.push(train_examples[rng.random_range(0..train_examples.len())]);
        }
        let ahead = lookahead(&params, &velocity, train.momentum)?;
        let (loss, grad) = loss_gradient(&program, &ahead, &batch, train.grad_method)?;
        if let Some(bad) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite gradient at slot {bad}, iteration {}",
                it + 1
            )));
        }
        let lr = lr_at(train.lr_schedule, train.lr_initial, it);
        (params, velocity) = nesterov_step(&params, &velocity, &grad, lr, train.momentum)?;
        train_loss.push(loss);
        if let Some(t) = trajectory.as_mut() {
            t.push(params.clone());
        }

        let done = it + 1;
        if done % train.eval_every == 0 || done == train.iterations {
            last_eval = evaluate(&program, &params, test_ds)?;
            log::debug!(
                "seed {seed} iteration {done}: batch loss {loss:.4}, test accuracy {:.4}",
                last_eval.accuracy
            );
            evals.push(EvalRecord {
                iteration: done,
                test_loss: last_eval.loss,
                test_accuracy: last_eval.accuracy,
            });
        }
    }

    let final_train_loss = evaluate(&program, &params, train_ds)?.loss;
    let best_accuracy = evals.iter().map(|e| e.test_accuracy).fold(0.0, f64::max);
    Ok(RunMetrics {
        seed,
        train_loss,
        initial_train_loss,
        final_train_loss,
        final_accuracy: last_eval.accuracy,
        best_accuracy,
        final_confusion: last_eval.confusion,
        final_params: params,
        trajectory,
        evals,
    })
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Run every seed in `train.seeds` and aggregate final test accuracy.
pub fn multi_run(
    net: &NetworkConfig,
    train: &TrainConfig,
    train_ds: &Dataset,
    test_ds: &Dataset,
) -> Result<Aggregate> {
    if train.seeds.len() < 2 {
        return Err(Error::Config(format!(
            "multi_run needs at least 2 seeds, got {}",
            train.seeds.len()
        )));
    }
    let runs = train
        .seeds
        .par_iter()
        .map(|&s| train_run(net, train, train_ds, test_ds, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(runs))
}

pub fn aggregate(runs: Vec<RunMetrics>) -> Aggregate {
    let finals: Vec<f64> = runs.iter().map(|r| r.final_accuracy).collect();
    let bests: Vec<f64> = runs.iter().map(|r| r.best_accuracy).collect();
    let (mean_accuracy, std_accuracy) = mean_std(&finals);
    Aggregate {
        mean_accuracy,
        std_accuracy,
        mean_best_accuracy: mean_std(&bests).0,
        best_run_accuracy: finals.iter().copied().fold(0.0, f64::max),
        runs,
    }
}
