use serde::{Deserialize, Serialize};

use super::idx::{IMAGE_LEN, IMAGE_SIDE};
use crate::error::{Error, Result};

pub const RESIZED_SIDE: usize = 16;
pub const RESIZED_LEN: usize = RESIZED_SIDE * RESIZED_SIDE;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResizeMethod {
    /// Half-pixel-centre bilinear interpolation, edges clamped.
    #[default]
    Bilinear,
    /// Mean over the covered source area.
    Area,
}

/// 28x28 row-major image to 16x16 row-major image.
pub fn resize_16(image: &[f64]) -> Result<Vec<f64>> {
    resize_16_with(image, ResizeMethod::Bilinear)
}

pub fn resize_16_with(image: &[f64], method: ResizeMethod) -> Result<Vec<f64>> {
    if image.len() != IMAGE_LEN {
        return Err(Error::Usage(format!(
            "resize expects {IMAGE_LEN} pixels, got {}",
            image.len()
        )));
    }
    let weights = match method {
        ResizeMethod::Bilinear => bilinear_weights(IMAGE_SIDE, RESIZED_SIDE),
        ResizeMethod::Area => area_weights(IMAGE_SIDE, RESIZED_SIDE),
    };
    let mut out = vec![0.0; RESIZED_LEN];
    for (r, wr) in weights.iter().enumerate() {
        for (c, wc) in weights.iter().enumerate() {
            let mut acc = 0.0;
            for &(sr, a) in wr {
                for &(sc, b) in wc {
                    acc += a * b * image[sr * IMAGE_SIDE + sc];
                }
            }
            out[r * RESIZED_SIDE + c] = acc;
        }
    }
    Ok(out)
}

/// Per output index, the (source index, weight) pairs along one axis.
fn bilinear_weights(src: usize, dst: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|o| {
            let x = ((o as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
            let lo = x.floor() as usize;
            let hi = (lo + 1).min(src - 1);
            let t = x - lo as f64;
            if hi == lo || t == 0.0 {
                vec![(lo, 1.0)]
            } else {
                vec![(lo, 1.0 - t), (hi, t)]
            }
        })
        .collect()
}

fn area_weights(src: usize, dst: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|o| {
            let (a, b) = (o as f64 * scale, (o + 1) as f64 * scale);
            (a.floor() as usize..(b.ceil() as usize).min(src))
                .filter_map(|s| {
                    let overlap = (b.min((s + 1) as f64) - a.max(s as f64)).max(0.0);
                    (overlap > 0.0).then_some((s, overlap / scale))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn transpose(img: &[f64], side: usize) -> Vec<f64> {
        (0..side * side).map(|i| img[(i % side) * side + i / side]).collect()
    }

    #[test]
    fn weights_sum_to_one() {
        for w in [bilinear_weights(28, 16), area_weights(28, 16)] {
            for row in w {
                let s: f64 = row.iter().map(|p| p.1).sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constants_and_zeros() {
        for m in [ResizeMethod::Bilinear, ResizeMethod::Area] {
            let out = resize_16_with(&vec![0.37; IMAGE_LEN], m).unwrap();
            assert_eq!(out.len(), 256);
            assert!(out.iter().all(|v| (v - 0.37).abs() < 1e-12));
            assert!(resize_16_with(&vec![0.0; IMAGE_LEN], m).unwrap().iter().all(|&v| v == 0.0));
        }
        assert!(resize_16(&[0.0; 10]).is_err());
    }

    #[test]
    fn first_output_pixel_mixes_first_two_rows() {
        // centre of output pixel 0 maps to source coordinate 0.375
        let mut img = vec![0.0; IMAGE_LEN];
        for c in 0..IMAGE_SIDE {
            img[IMAGE_SIDE + c] = 1.0;
        }
        let out = resize_16(&img).unwrap();
        assert!((out[0] - 0.375).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn commutes_with_transpose(img in proptest::collection::vec(0.0f64..1.0, IMAGE_LEN)) {
            let a = resize_16(&transpose(&img, IMAGE_SIDE)).unwrap();
            let b = transpose(&resize_16(&img).unwrap(), RESIZED_SIDE);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            prop_assert!(a.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
        }
    }
}
