use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::{Dataset, Source, Split};
use crate::error::{Error, Result};

pub const IRIS_FEATURES: usize = 4;
pub const IRIS_TEST_SIZE: usize = 37;

enum ClassCol {
    Index(usize),
    Name(String),
}

/// Four numeric columns and a class column, which may hold names or integer
/// indices. A non-numeric first row is taken as a header and skipped.
/// Names are numbered in order of first appearance.
pub fn parse_iris_csv(path: &Path) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::parse(path, e.to_string()))?;

    let mut rows: Vec<(Vec<f64>, ClassCol)> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::parse(path, format!("row {row}: {e}")))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != IRIS_FEATURES + 1 {
            return Err(Error::parse(
                path,
                format!("row {row}: expected {} columns, found {}", IRIS_FEATURES + 1, rec.len()),
            ));
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            rec.iter().take(IRIS_FEATURES).map(str::parse::<f64>).collect();
        let features = match parsed {
            Ok(f) if f.iter().all(|x| x.is_finite()) => f,
            _ if row == 1 => continue,
            _ => {
                return Err(Error::parse(
                    path,
                    format!("row {row}: feature columns must be finite numbers"),
                ))
            }
        };
        let class = &rec[IRIS_FEATURES];
        let class = match class.parse::<usize>() {
            Ok(k) => ClassCol::Index(k),
            Err(_) if !class.is_empty() => ClassCol::Name(class.to_string()),
            Err(_) => return Err(Error::parse(path, format!("row {row}: empty class column"))),
        };
        rows.push((features, class));
    }
    if rows.is_empty() {
        return Err(Error::parse(path, "no data rows"));
    }

    let mut names: Vec<String> = Vec::new();
    let mut samples = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    let mut saw_index = false;
    for (features, class) in rows {
        let label = match class {
            ClassCol::Index(k) => {
                saw_index = true;
                k
            }
            ClassCol::Name(n) => match names.iter().position(|x| *x == n) {
                Some(k) => k,
                None => {
                    names.push(n);
                    names.len() - 1
                }
            },
        };
        samples.push(features);
        labels.push(label);
    }
    if saw_index && !names.is_empty() {
        return Err(Error::parse(path, "class column mixes names and integer indices"));
    }
    let num_classes = labels.iter().max().map_or(0, |m| m + 1);
    Dataset::new(samples, labels, num_classes, Split::Full, Source::Iris)
}

/// Seeded split stratified by class. The test share of each class is
/// proportional to its size, with leftover test slots going to the classes
/// with the largest remainders (lowest class index first on ties).
pub fn stratified_split(ds: &Dataset, test_size: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    if test_size == 0 || test_size >= ds.len() {
        return Err(Error::Usage(format!(
            "test size {test_size} must lie in 1..{}",
            ds.len()
        )));
    }
    let counts = ds.class_counts();
    let n = ds.len();
    let mut quota: Vec<usize> = counts.iter().map(|&c| c * test_size / n).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by_key(|&k| std::cmp::Reverse((counts[k] * test_size) % n));
    let mut left = test_size - quota.iter().sum::<usize>();
    for k in order {
        if left == 0 {
            break;
        }
        quota[k] += 1;
        left -= 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = (Vec::new(), Vec::new());
    let mut test = (Vec::new(), Vec::new());
    for (k, &q) in quota.iter().enumerate() {
        let mut idx: Vec<usize> = (0..n).filter(|&i| ds.labels[i] == k).collect();
        idx.shuffle(&mut rng);
        for (j, &i) in idx.iter().enumerate() {
            let dst = if j < q { &mut test } else { &mut train };
            dst.0.push(ds.samples[i].clone());
            dst.1.push(k);
        }
    }
    Ok((
        Dataset::new(train.0, train.1, ds.num_classes, Split::Train, ds.source)?,
        Dataset::new(test.0, test.1, ds.num_classes, Split::Test, ds.source)?,
    ))
}
