use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::dataset::{filter_classes, Dataset, Source, Split};
use super::idx::parse_idx;
use super::iris::{parse_iris_csv, stratified_split, IRIS_TEST_SIZE};
use super::reducer::{fit_reducer, ReducerKind, ReducerOptions};
use super::scale::{scale_for_angle, FeatureRange};
use crate::error::{Error, Result};

/// What to load and how to turn it into encoder inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub source: Source,
    /// Original class labels to keep, relabelled 0.. in this order.
    pub classes: Vec<usize>,
    /// Keep only the first n training images of each class.
    #[serde(default)]
    pub train_per_class: Option<usize>,
    /// Required for image sources, must be absent for Iris.
    #[serde(default)]
    pub reducer: Option<ReducerKind>,
    #[serde(default)]
    pub reducer_options: ReducerOptions,
    /// Seed of the Iris train/test shuffle.
    #[serde(default)]
    pub split_seed: u64,
    #[serde(default = "default_iris_test_size")]
    pub iris_test_size: usize,
    #[serde(default)]
    pub iris_scaling: IrisScaling,
}

/// How Iris measurements become rotation angles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IrisScaling {
    /// The measurements (in cm) are the angles.
    #[default]
    None,
    /// Min-max onto [0, pi] with the training-split range.
    MinMax,
}

fn default_iris_test_size() -> usize {
    IRIS_TEST_SIZE
}

impl DataSpec {
    pub fn images(source: Source, classes: Vec<usize>, reducer: ReducerKind) -> Self {
        DataSpec {
            source,
            classes,
            train_per_class: None,
            reducer: Some(reducer),
            reducer_options: ReducerOptions::default(),
            split_seed: 0,
            iris_test_size: IRIS_TEST_SIZE,
            iris_scaling: IrisScaling::None,
        }
    }

    pub fn iris() -> Self {
        DataSpec {
            source: Source::Iris,
            classes: vec![0, 1, 2],
            train_per_class: None,
            reducer: None,
            reducer_options: ReducerOptions::default(),
            split_seed: 0,
            iris_test_size: IRIS_TEST_SIZE,
            iris_scaling: IrisScaling::None,
        }
    }

    /// Length of each prepared sample.
    pub fn feature_len(&self) -> usize {
        match self.reducer {
            Some(r) => r.output_len(),
            None => super::iris::IRIS_FEATURES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.source, self.reducer) {
            (Source::Synthetic, _) => {
                return Err(Error::Config("synthetic data cannot be prepared from files".into()))
            }
            (Source::Iris, Some(_)) => {
                return Err(Error::Config("Iris takes no reducer".into()))
            }
            (Source::Mnist | Source::FashionMnist, None) => {
                return Err(Error::Config("image datasets need a reducer".into()))
            }
            _ => {}
        }
        if self.classes.len() < 2 {
            return Err(Error::Config("at least two classes are required".into()));
        }
        if self.train_per_class == Some(0) {
            return Err(Error::Config("train_per_class must be >= 1".into()));
        }
        Ok(())
    }
}

/// File locations under a data root: `mnist/`, `fashion/` (standard IDX
/// names) and `iris.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct DataPaths {
    pub root: PathBuf,
}

impl DataPaths {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DataPaths { root: root.into() }
    }

    fn dir(&self, source: Source) -> PathBuf {
        match source {
            Source::FashionMnist => self.root.join("fashion"),
            _ => self.root.join("mnist"),
        }
    }

    pub fn images(&self, source: Source, split: Split) -> PathBuf {
        let stem = if split == Split::Test { "t10k" } else { "train" };
        self.dir(source).join(format!("{stem}-images-idx3-ubyte"))
    }

    pub fn labels(&self, source: Source, split: Split) -> PathBuf {
        let stem = if split == Split::Test { "t10k" } else { "train" };
        self.dir(source).join(format!("{stem}-labels-idx1-ubyte"))
    }

    pub fn iris(&self) -> PathBuf {
        self.root.join("iris.csv")
    }

    pub fn inputs(&self, source: Source) -> Vec<PathBuf> {
        match source {
            Source::Iris => vec![self.iris()],
            _ => [Split::Train, Split::Test]
                .iter()
                .flat_map(|&s| [self.images(source, s), self.labels(source, s)])
                .collect(),
        }
    }
}

/// Encoder-ready train and test splits.
#[derive(Clone, Debug, PartialEq)]
pub struct Prepared {
    pub train: Dataset,
    pub test: Dataset,
    pub reducer_fingerprint: Option<String>,
}

pub fn load_images(paths: &DataPaths, source: Source, split: Split) -> Result<Dataset> {
    parse_idx(&paths.images(source, split), &paths.labels(source, split), split, source)
}

pub fn prepare(spec: &DataSpec, paths: &DataPaths) -> Result<Prepared> {
    spec.validate()?;
    if spec.source == Source::Iris {
        let full = filter_classes(&parse_iris_csv(&paths.iris())?, &spec.classes)?;
        let (train, test) = stratified_split(&full, spec.iris_test_size, spec.split_seed)?;
        if spec.iris_scaling == IrisScaling::None {
            return Ok(Prepared {
                train,
                test,
                reducer_fingerprint: None,
            });
        }
        let range = FeatureRange::fit(&train.samples)?;
        let scale = |x: &[f64]| scale_for_angle(x, &range);
        return Ok(Prepared {
            train: train.map_samples(scale)?,
            test: test.map_samples(scale)?,
            reducer_fingerprint: None,
        });
    }
    let mut train = filter_classes(&load_images(paths, spec.source, Split::Train)?, &spec.classes)?;
    if let Some(n) = spec.train_per_class {
        train = train.take_per_class(n);
    }
    let test = filter_classes(&load_images(paths, spec.source, Split::Test)?, &spec.classes)?;
    let reducer = fit_reducer(
        &train,
        spec.reducer.expect("validated"),
        &spec.reducer_options,
    )?;
    Ok(Prepared {
        train: reducer.transform(&train)?,
        test: reducer.transform(&test)?,
        reducer_fingerprint: Some(reducer.fingerprint()),
    })
}

/// Sidecar of a cached preparation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheMeta {
    pub key: String,
    pub spec: DataSpec,
    pub feature_len: usize,
    pub num_classes: usize,
    pub train_labels: Vec<usize>,
    pub test_labels: Vec<usize>,
    pub reducer_fingerprint: Option<String>,
}

pub const CACHE_DATA: &str = "prepared.bin";
pub const CACHE_META: &str = "prepared.json";

/// Hash of the spec and the bytes of every input file.
pub fn cache_key(spec: &DataSpec, paths: &DataPaths) -> Result<String> {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(spec).expect("spec serializes"));
    for p in paths.inputs(spec.source) {
        let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(&bytes);
    }
    Ok(hex::encode(h.finalize()))
}

/// Train rows then test rows as little-endian f64, plus a JSON sidecar.
pub fn write_cache(dir: &Path, key: &str, spec: &DataSpec, p: &Prepared) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let feature_len = spec.feature_len();
    let mut bytes = Vec::with_capacity((p.train.len() + p.test.len()) * feature_len * 8);
    for row in p.train.samples.iter().chain(&p.test.samples) {
        if row.len() != feature_len {
            return Err(Error::Usage(format!(
                "prepared row has {} values, expected {feature_len}",
                row.len()
            )));
        }
        for x in row {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
    }
    let meta = CacheMeta {
        key: key.to_string(),
        spec: spec.clone(),
        feature_len,
        num_classes: p.train.num_classes,
        train_labels: p.train.labels.clone(),
        test_labels: p.test.labels.clone(),
        reducer_fingerprint: p.reducer_fingerprint.clone(),
    };
    let data = dir.join(CACHE_DATA);
    fs::write(&data, bytes).map_err(|e| Error::io(&data, e))?;
    let side = dir.join(CACHE_META);
    let json = serde_json::to_string_pretty(&meta).expect("meta serializes");
    fs::write(&side, json + "\n").map_err(|e| Error::io(&side, e))
}

pub fn read_cache_meta(dir: &Path) -> Result<CacheMeta> {
    let side = dir.join(CACHE_META);
    let text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(&side, e.to_string()))
}

pub fn read_cache(dir: &Path) -> Result<(CacheMeta, Prepared)> {
    let meta = read_cache_meta(dir)?;
    let data = dir.join(CACHE_DATA);
    let bytes = fs::read(&data).map_err(|e| Error::io(&data, e))?;
    let rows = meta.train_labels.len() + meta.test_labels.len();
    let want = rows * meta.feature_len * 8;
    if bytes.len() != want {
        return Err(Error::parse(
            &data,
            format!("expected {want} bytes for {rows} rows, found {}", bytes.len()),
        ));
    }
    let mut values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    let mut take = |n: usize| -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| values.by_ref().take(meta.feature_len).collect())
            .collect()
    };
    let train_samples = take(meta.train_labels.len());
    let test_samples = take(meta.test_labels.len());
    let source = meta.spec.source;
    let prepared = Prepared {
        train: Dataset::new(train_samples, meta.train_labels.clone(), meta.num_classes, Split::Train, source)?,
        test: Dataset::new(test_samples, meta.test_labels.clone(), meta.num_classes, Split::Test, source)?,
        reducer_fingerprint: meta.reducer_fingerprint.clone(),
    };
    Ok((meta, prepared))
}

/// Load from `cache_dir` when its key matches, else prepare and write it.
/// The flag reports a cache hit.
pub fn prepare_cached(spec: &DataSpec, paths: &DataPaths, cache_dir: &Path) -> Result<(Prepared, bool)> {
    spec.validate()?;
    let key = cache_key(spec, paths)?;
    if let Ok(meta) = read_cache_meta(cache_dir) {
        if meta.key == key {
            return Ok((read_cache(cache_dir)?.1, true));
        }
    }
    let prepared = prepare(spec, paths)?;
    write_cache(cache_dir, &key, spec, &prepared)?;
    Ok((prepared, false))
}
