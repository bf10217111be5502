use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::autoencoder::{Autoencoder, AutoencoderOptions, CODE};
use super::dataset::{Dataset, Split};
use super::pca::Pca;
use super::resize::{resize_16_with, ResizeMethod};
use super::scale::{normalize_l2, scale_for_angle, FeatureRange};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReducerKind {
    /// 28x28 to 16x16, for amplitude encoding.
    #[serde(rename = "resize")]
    Resize16,
    /// Top-8 principal components, for angle encoding.
    #[serde(rename = "pca")]
    Pca8,
    /// 8-unit code of a trained autoencoder, for angle encoding.
    #[serde(rename = "autoencoder")]
    Autoencoder8,
}

impl ReducerKind {
    pub fn output_len(self) -> usize {
        match self {
            ReducerKind::Resize16 => super::resize::RESIZED_LEN,
            ReducerKind::Pca8 | ReducerKind::Autoencoder8 => CODE,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducerOptions {
    #[serde(default)]
    pub resize_method: ResizeMethod,
    #[serde(default)]
    pub autoencoder: AutoencoderOptions,
}

/// A fitted reduction. Everything learned comes from the training split and
/// stays frozen afterwards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reducer {
    pub kind: ReducerKind,
    pub resize_method: ResizeMethod,
    pub pca: Option<Pca>,
    pub autoencoder: Option<Autoencoder>,
    /// Range of the reduced training features, used for angle scaling.
    pub feature_range: Option<FeatureRange>,
}

pub fn fit_reducer(train: &Dataset, kind: ReducerKind, opts: &ReducerOptions) -> Result<Reducer> {
    if train.split == Split::Test {
        return Err(Error::Usage("reducers must not be fitted on the test split".into()));
    }
    let mut r = Reducer {
        kind,
        resize_method: opts.resize_method,
        pca: None,
        autoencoder: None,
        feature_range: None,
    };
    match kind {
        ReducerKind::Resize16 => return Ok(r),
        ReducerKind::Pca8 => r.pca = Some(Pca::fit(&train.samples, CODE)?),
        ReducerKind::Autoencoder8 => {
            r.autoencoder = Some(Autoencoder::fit(&train.samples, &opts.autoencoder)?)
        }
    }
    let reduced = train
        .samples
        .par_iter()
        .map(|s| apply_reducer(&r, s))
        .collect::<Result<Vec<_>>>()?;
    r.feature_range = Some(FeatureRange::fit(&reduced)?);
    Ok(r)
}

/// Reduced features before any scaling.
pub fn apply_reducer(r: &Reducer, sample: &[f64]) -> Result<Vec<f64>> {
    match r.kind {
        ReducerKind::Resize16 => resize_16_with(sample, r.resize_method),
        ReducerKind::Pca8 => r.pca.as_ref().expect("fitted PCA").transform(sample),
        ReducerKind::Autoencoder8 => r.autoencoder.as_ref().expect("fitted autoencoder").encode(sample),
    }
}

impl Reducer {
    /// Reduce and bring to encoder form: unit norm after resizing, [0, pi]
    /// angles after PCA or the autoencoder.
    pub fn encode_ready(&self, sample: &[f64]) -> Result<Vec<f64>> {
        let reduced = apply_reducer(self, sample)?;
        match &self.feature_range {
            None => normalize_l2(&reduced),
            Some(range) => scale_for_angle(&reduced, range),
        }
    }

    pub fn transform(&self, ds: &Dataset) -> Result<Dataset> {
        let samples = ds
            .samples
            .par_iter()
            .map(|s| self.encode_ready(s))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(samples, ds.labels.clone(), ds.num_classes, ds.split, ds.source)
    }

    /// SHA-256 of the serialized fitted state.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("reducer serializes");
        hex::encode(Sha256::digest(json))
    }
}
