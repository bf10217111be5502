//! Dense 784-64-8-64-784 autoencoder trained with mini-batch gradient descent
//! on squared reconstruction error. Only the encoder half is used afterwards.
//!
//! Hidden layers use tanh, the 8-unit code is linear and the output layer is
//! a sigmoid so reconstructions stay in [0, 1].

use nalgebra::{DMatrix, RowDVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HIDDEN: usize = 64;
pub const CODE: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AutoencoderOptions {
    pub seed: u64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Stop after this many epochs without a relative validation improvement
    /// of at least `min_improvement`.
    pub patience: usize,
    pub min_improvement: f64,
    /// Share of the training rows held out for the stopping rule.
    pub validation_fraction: f64,
}

impl Default for AutoencoderOptions {
    fn default() -> Self {
        AutoencoderOptions {
            seed: 0,
            learning_rate: 0.05,
            batch_size: 32,
            max_epochs: 40,
            patience: 3,
            min_improvement: 1e-3,
            validation_fraction: 0.1,
        }
    }
}

/// Row-major `inputs x outputs` weights and a bias per output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    fn init(inputs: usize, outputs: usize, rng: &mut ChaCha8Rng) -> Self {
        let a = (6.0 / (inputs + outputs) as f64).sqrt();
        Dense {
            inputs,
            outputs,
            weights: (0..inputs * outputs).map(|_| rng.random_range(-a..a)).collect(),
            bias: vec![0.0; outputs],
        }
    }

    fn w(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.inputs, self.outputs, &self.weights)
    }

    fn forward(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut z = x * self.w();
        let b = RowDVector::from_row_slice(&self.bias);
        for mut row in z.row_iter_mut() {
            row += &b;
        }
        z
    }

    fn update(&mut self, grad_w: &DMatrix<f64>, grad_b: &RowDVector<f64>, lr: f64) {
        for i in 0..self.inputs {
            for j in 0..self.outputs {
                self.weights[i * self.outputs + j] -= lr * grad_w[(i, j)];
            }
        }
        for (b, g) in self.bias.iter_mut().zip(grad_b.iter()) {
            *b -= lr * g;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Autoencoder {
    pub layers: [Dense; 4],
    pub epochs_run: usize,
    /// Mean squared error per pixel on the held-out rows after each epoch.
    pub validation_mse: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

struct Activations {
    h1: DMatrix<f64>,
    code: DMatrix<f64>,
    h3: DMatrix<f64>,
    out: DMatrix<f64>,
}

impl Autoencoder {
    fn activations(&self, x: &DMatrix<f64>) -> Activations {
        let h1 = self.layers[0].forward(x).map(f64::tanh);
        let code = self.layers[1].forward(&h1);
        let h3 = self.layers[2].forward(&code).map(f64::tanh);
        let out = self.layers[3].forward(&h3).map(sigmoid);
        Activations { h1, code, h3, out }
    }

    fn mse(&self, x: &DMatrix<f64>) -> f64 {
        let a = self.activations(x);
        (&a.out - x).norm_squared() / (x.nrows() * x.ncols()) as f64
    }

    fn step(&mut self, x: &DMatrix<f64>, lr: f64) {
        let a = self.activations(x);
        let b = x.nrows() as f64;
        // loss per row: 0.5 * sum of squared pixel errors, averaged over rows
        let d_out = (&a.out - x).component_mul(&a.out.map(|y| y * (1.0 - y))) / b;
        let d_h3 = (&d_out * self.layers[3].w().transpose())
            .component_mul(&a.h3.map(|h| 1.0 - h * h));
        let d_code = &d_h3 * self.layers[2].w().transpose();
        let d_h1 = (&d_code * self.layers[1].w().transpose())
            .component_mul(&a.h1.map(|h| 1.0 - h * h));

        let grads = [
            (x.transpose() * &d_h1, d_h1.row_sum()),
            (a.h1.transpose() * &d_code, d_code.row_sum()),
            (a.code.transpose() * &d_h3, d_h3.row_sum()),
            (a.h3.transpose() * &d_out, d_out.row_sum()),
        ];
        for (layer, (gw, gb)) in self.layers.iter_mut().zip(grads.iter()) {
            layer.update(gw, gb, lr);
        }
    }

    /// Train on `samples`, holding out a seeded share of them for the stopping rule.
    pub fn fit(samples: &[Vec<f64>], opts: &AutoencoderOptions) -> Result<Self> {
        let d = samples.first().map_or(0, Vec::len);
        if samples.len() < 10 || d == 0 || samples.iter().any(|s| s.len() != d) {
            return Err(Error::Usage(
                "autoencoder needs at least 10 equal-length samples".into(),
            ));
        }
        if opts.learning_rate.is_nan() || opts.learning_rate <= 0.0 || opts.batch_size == 0 || opts.max_epochs == 0 {
            return Err(Error::Config(
                "autoencoder learning_rate, batch_size and max_epochs must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&opts.validation_fraction) {
            return Err(Error::Config("validation_fraction must lie in [0, 1)".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut ae = Autoencoder {
            layers: [
                Dense::init(d, HIDDEN, &mut rng),
                Dense::init(HIDDEN, CODE, &mut rng),
                Dense::init(CODE, HIDDEN, &mut rng),
                Dense::init(HIDDEN, d, &mut rng),
            ],
            epochs_run: 0,
            validation_mse: Vec::new(),
        };

        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.shuffle(&mut rng);
        let n_val = ((samples.len() as f64 * opts.validation_fraction).round() as usize).max(1);
        let (val_idx, train_idx) = order.split_at(n_val);
        let rows = |idx: &[usize]| DMatrix::from_fn(idx.len(), d, |i, j| samples[idx[i]][j]);
        let val = rows(val_idx);
        let mut train_idx = train_idx.to_vec();

        let mut best = f64::INFINITY;
        let mut stale = 0;
        for _ in 0..opts.max_epochs {
            train_idx.shuffle(&mut rng);
            for chunk in train_idx.chunks(opts.batch_size) {
                ae.step(&rows(chunk), opts.learning_rate);
            }
            let mse = ae.mse(&val);
            if !mse.is_finite() {
                return Err(Error::Numeric("autoencoder training diverged".into()));
            }
            ae.validation_mse.push(mse);
            ae.epochs_run += 1;
            if mse < best * (1.0 - opts.min_improvement) {
                best = mse;
                stale = 0;
            } else {
                stale += 1;
                if stale >= opts.patience {
                    break;
                }
            }
        }
        Ok(ae)
    }

    pub fn encode(&self, sample: &[f64]) -> Result<Vec<f64>> {
        if sample.len() != self.layers[0].inputs {
            return Err(Error::Usage(format!(
                "autoencoder expects {} inputs, got {}",
                self.layers[0].inputs,
                sample.len()
            )));
        }
        let x = DMatrix::from_row_slice(1, sample.len(), sample);
        let h1 = self.layers[0].forward(&x).map(f64::tanh);
        Ok(self.layers[1].forward(&h1).iter().copied().collect())
    }

    pub fn reconstruct(&self, sample: &[f64]) -> Vec<f64> {
        let x = DMatrix::from_row_slice(1, sample.len(), sample);
        self.activations(&x).out.iter().copied().collect()
    }
}
