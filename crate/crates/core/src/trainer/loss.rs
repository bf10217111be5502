use crate::circuit::Program;
use crate::error::{Error, Result};

/// Lower clamp on probabilities before taking the log.
pub const PROB_FLOOR: f64 = 1e-12;

/// A network input with its class index.
pub type Example<'a> = (&'a [f64], usize);

pub fn softmax(scores: &[f64]) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::Usage("softmax of an empty vector".into()));
    }
    if let Some(x) = scores.iter().find(|x| !x.is_finite()) {
        return Err(Error::Numeric(format!("softmax input contains {x}")));
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|&x| (x - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / total).collect())
}

/// `-sum_j y_j ln(max(p_j, 1e-12))`.
pub fn cross_entropy(probs: &[f64], onehot: &[f64]) -> f64 {
    debug_assert_eq!(probs.len(), onehot.len());
    -probs
        .iter()
        .zip(onehot)
        .filter(|(_, &y)| y != 0.0)
        .map(|(&p, &y)| y * p.max(PROB_FLOOR).ln())
        .sum::<f64>()
}

/// Cross-entropy of softmax(scores) against class `label`.
pub(crate) fn sample_loss(scores: &[f64], label: usize) -> Result<(f64, Vec<f64>)> {
    let probs = softmax(scores)?;
    let p = probs
        .get(label)
        .ok_or_else(|| Error::Usage(format!("label {label} out of range for {} classes", probs.len())))?;
    Ok((-p.max(PROB_FLOOR).ln(), probs))
}

/// Mean loss over the batch and the raw ancilla scores of every sample.
/// Summation runs in batch order.
pub fn loss_and_outputs(
    program: &Program,
    params: &[f64],
    batch: &[Example<'_>],
) -> Result<(f64, Vec<Vec<f64>>)> {
    if batch.is_empty() {
        return Err(Error::Usage("empty batch".into()));
    }
    let mut total = 0.0;
    let mut outputs = Vec::with_capacity(batch.len());
    for &(features, label) in batch {
        let scores = program.forward(params, features)?;
        total += sample_loss(&scores, label)?.0;
        outputs.push(scores);
    }
    Ok((total / batch.len() as f64, outputs))
}

pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datapipe::one_hot;
    use proptest::prelude::*;

    #[test]
    fn softmax_cases() {
        assert_eq!(softmax(&[0.0, 0.0]).unwrap(), vec![0.5, 0.5]);
        for p in softmax(&[1.0, 1.0, 1.0]).unwrap() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(matches!(softmax(&[0.0, f64::NAN]), Err(Error::Numeric(_))));
    }

    #[test]
    fn cross_entropy_cases() {
        assert!(cross_entropy(&[1.0, 0.0], &[1.0, 0.0]).abs() < 1e-15);
        assert!((cross_entropy(&[0.5, 0.5], &[1.0, 0.0]) - std::f64::consts::LN_2).abs() < 1e-15);
        // clamped, finite
        let l = cross_entropy(&[0.0, 1.0], &[1.0, 0.0]);
        assert!((l - 1e-12f64.ln().abs()).abs() < 1e-9);
    }

    #[test]
    fn argmax_picks_first_maximum() {
        assert_eq!(argmax(&[0.1, 0.5, 0.5]), 1);
        assert_eq!(argmax(&[-1.0]), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn softmax_is_shift_invariant(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -50.0f64..50.0) {
            let p = softmax(&[a, b]).unwrap();
            let q = softmax(&[a + c, b + c]).unwrap();
            prop_assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn loss_is_nonnegative(raw in proptest::collection::vec(0.0f64..1.0, 2..6), pick in 0usize..6) {
            let total: f64 = raw.iter().sum::<f64>() + 1e-9;
            let probs: Vec<f64> = raw.iter().map(|x| (x + 1e-9 / raw.len() as f64) / total).collect();
            let y = one_hot(pick % probs.len(), probs.len()).unwrap();
            prop_assert!(cross_entropy(&probs, &y) >= 0.0);
        }
    }
}
