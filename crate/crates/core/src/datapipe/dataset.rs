use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
    /// A file that has not been split yet (Iris ships as one table).
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Mnist,
    FashionMnist,
    Iris,
    Synthetic,
}

/// Feature rows with integer labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
    pub split: Split,
    pub source: Source,
}

impl Dataset {
    pub fn new(
        samples: Vec<Vec<f64>>,
        labels: Vec<usize>,
        num_classes: usize,
        split: Split,
        source: Source,
    ) -> Result<Self> {
        if samples.len() != labels.len() {
            return Err(Error::Usage(format!(
                "{} samples but {} labels",
                samples.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::Usage(format!(
                "label {bad} out of range for {num_classes} classes"
            )));
        }
        Ok(Dataset {
            samples,
            labels,
            num_classes,
            split,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_len(&self) -> Option<usize> {
        self.samples.first().map(Vec::len)
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Replace every sample by `f(sample)`, keeping labels.
    pub fn map_samples<F>(&self, f: F) -> Result<Dataset>
    where
        F: Fn(&[f64]) -> Result<Vec<f64>>,
    {
        let samples = self
            .samples
            .iter()
            .map(|s| f(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            samples,
            labels: self.labels.clone(),
            ..*self
        })
    }

    /// Keep the first `n` samples of each class, in file order.
    pub fn take_per_class(&self, n: usize) -> Dataset {
        let mut seen = vec![0; self.num_classes];
        let mut samples = Vec::new();
        let mut labels = Vec::new();
        for (s, &l) in self.samples.iter().zip(&self.labels) {
            if seen[l] < n {
                seen[l] += 1;
                samples.push(s.clone());
                labels.push(l);
            }
        }
        Dataset {
            samples,
            labels,
            ..*self
        }
    }
}

/// Keep only `classes` and relabel them to `0..classes.len()` in the given order.
pub fn filter_classes(ds: &Dataset, classes: &[usize]) -> Result<Dataset> {
    if classes.is_empty() {
        return Err(Error::Usage("no classes selected".into()));
    }
    for (i, &c) in classes.iter().enumerate() {
        if classes[..i].contains(&c) {
            return Err(Error::Usage(format!("class {c} listed twice")));
        }
        if c >= ds.num_classes || !ds.labels.contains(&c) {
            return Err(Error::Usage(format!("class {c} is not present in the dataset")));
        }
    }
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for (s, &l) in ds.samples.iter().zip(&ds.labels) {
        if let Some(new) = classes.iter().position(|&c| c == l) {
            samples.push(s.clone());
            labels.push(new);
        }
    }
    Ok(Dataset {
        samples,
        labels,
        num_classes: classes.len(),
        split: ds.split,
        source: ds.source,
    })
}

/// Standard basis vector for `label`.
pub fn one_hot(label: usize, k: usize) -> Result<Vec<f64>> {
    if label >= k {
        return Err(Error::Usage(format!("label {label} out of range for {k} classes")));
    }
    let mut v = vec![0.0; k];
    v[label] = 1.0;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        Dataset::new(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
            vec![2, 0, 1, 2, 0],
            3,
            Split::Train,
            Source::Synthetic,
        )
        .unwrap()
    }

    #[test]
    fn one_hot_cases() {
        assert_eq!(one_hot(1, 2).unwrap(), vec![0.0, 1.0]);
        assert_eq!(one_hot(0, 3).unwrap(), vec![1.0, 0.0, 0.0]);
        for k in 1..6 {
            for l in 0..k {
                assert_eq!(one_hot(l, k).unwrap().iter().sum::<f64>(), 1.0);
            }
        }
        assert!(one_hot(3, 3).is_err());
    }

    #[test]
    fn filter_relabels_in_given_order() {
        let f = filter_classes(&toy(), &[2, 0]).unwrap();
        assert_eq!(f.labels, vec![0, 1, 0, 1]);
        assert_eq!(f.samples, vec![vec![0.0], vec![1.0], vec![3.0], vec![4.0]]);
        assert_eq!(f.num_classes, 2);
    }

    #[test]
    fn filter_is_idempotent_for_identity_selection() {
        let once = filter_classes(&toy(), &[0, 1]).unwrap();
        let twice = filter_classes(&once, &[0, 1]).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn filter_rejects_unknown_or_repeated() {
        assert!(filter_classes(&toy(), &[5]).is_err());
        assert!(filter_classes(&toy(), &[1, 1]).is_err());
        assert!(filter_classes(&toy(), &[]).is_err());
    }

    #[test]
    fn label_range_is_checked() {
        assert!(Dataset::new(vec![vec![0.0]], vec![3], 3, Split::Test, Source::Synthetic).is_err());
        assert!(Dataset::new(vec![vec![0.0]], vec![], 3, Split::Test, Source::Synthetic).is_err());
    }

    #[test]
    fn take_per_class_keeps_file_order() {
        let t = toy().take_per_class(1);
        assert_eq!(t.labels, vec![2, 0, 1]);
        assert_eq!(t.class_counts(), vec![1, 1, 1]);
    }
}
