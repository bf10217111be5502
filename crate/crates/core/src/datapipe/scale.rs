use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-feature minimum and maximum, fitted on the training split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureRange {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl FeatureRange {
    pub fn fit(samples: &[Vec<f64>]) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::Usage("cannot fit a feature range on no samples".into()))?;
        let mut min = first.clone();
        let mut max = first.clone();
        for (i, s) in samples.iter().enumerate() {
            if s.len() != min.len() {
                return Err(Error::Usage(format!(
                    "sample {i} has {} features, expected {}",
                    s.len(),
                    min.len()
                )));
            }
            for (j, &x) in s.iter().enumerate() {
                min[j] = min[j].min(x);
                max[j] = max[j].max(x);
            }
        }
        for (j, (lo, hi)) in min.iter().zip(&max).enumerate() {
            if lo == hi {
                log::warn!("feature {j} is constant ({lo}) on the training split; it will map to pi/2");
            }
        }
        Ok(FeatureRange { min, max })
    }

    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }
}

/// Min-max map of each feature onto [0, pi], clamped. A feature whose
/// training range has zero width maps to pi/2.
pub fn scale_for_angle(features: &[f64], range: &FeatureRange) -> Result<Vec<f64>> {
    if features.len() != range.len() {
        return Err(Error::Usage(format!(
            "{} features for a range fitted on {}",
            features.len(),
            range.len()
        )));
    }
    Ok(features
        .iter()
        .zip(range.min.iter().zip(&range.max))
        .map(|(&x, (&lo, &hi))| {
            if hi > lo {
                (PI * (x - lo) / (hi - lo)).clamp(0.0, PI)
            } else {
                FRAC_PI_2
            }
        })
        .collect())
}

/// Divide by the Euclidean norm.
pub fn normalize_l2(features: &[f64]) -> Result<Vec<f64>> {
    let norm = features.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Encoding(format!(
            "cannot amplitude-encode a vector with norm {norm}"
        )));
    }
    Ok(features.iter().map(|x| x / norm).collect())
}
