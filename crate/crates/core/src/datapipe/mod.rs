//! Dataset loading and preprocessing: IDX and CSV parsers, dimensionality
//! reduction to the encoder's input length, and feature scaling.

mod autoencoder;
mod dataset;
mod idx;
mod iris;
mod pca;
mod pipeline;
mod reducer;
mod resize;
mod scale;

pub use autoencoder::{Autoencoder, AutoencoderOptions, Dense};
pub use dataset::{filter_classes, one_hot, Dataset, Source, Split};
pub use idx::{
    encode_idx_images, encode_idx_labels, parse_idx, parse_idx_images, parse_idx_labels,
    IMAGE_LEN, IMAGE_SIDE,
};
pub use iris::{parse_iris_csv, stratified_split, IRIS_FEATURES, IRIS_TEST_SIZE};
pub use pca::Pca;
pub use pipeline::{
    cache_key, load_images, prepare, prepare_cached, read_cache, read_cache_meta, write_cache,
    CacheMeta, DataPaths, DataSpec, IrisScaling, Prepared, CACHE_DATA, CACHE_META,
};
pub use reducer::{apply_reducer, fit_reducer, Reducer, ReducerKind, ReducerOptions};
pub use resize::{resize_16, resize_16_with, ResizeMethod, RESIZED_LEN, RESIZED_SIDE};
pub use scale::{normalize_l2, scale_for_angle, FeatureRange};
