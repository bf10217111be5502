//! Seeded fixtures shared by the benchmarks.

use qcnn_core::{Encoding, NetworkConfig, Program};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random angles in [-pi, pi) for every slot of `program`.
pub fn params(program: &Program, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..program.num_params())
        .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect()
}

/// `n` encoder-ready inputs with labels.
pub fn inputs(net: &NetworkConfig, n: usize, seed: u64) -> Vec<(Vec<f64>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x = match net.encoding {
                Encoding::Angle => (0..net.input_len()).map(|_| rng.random_range(0.0..3.0)).collect(),
                Encoding::Amplitude => {
                    let v: Vec<f64> = (0..net.input_len()).map(|_| rng.random_range(0.0..1.0)).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / norm).collect()
                }
            };
            (x, rng.random_range(0..net.num_classes))
        })
        .collect()
}
