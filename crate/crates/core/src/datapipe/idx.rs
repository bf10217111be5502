use std::fs;
use std::path::Path;

use super::dataset::{Dataset, Source, Split};
use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const IMAGE_SIDE: usize = 28;
pub const IMAGE_LEN: usize = IMAGE_SIDE * IMAGE_SIDE;

fn be_u32(bytes: &[u8], offset: usize, path: &Path) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| {
            Error::parse(
                path,
                format!("file ends at byte {} while reading header word at offset {offset}", bytes.len()),
            )
        })
}

fn check_magic(bytes: &[u8], want: u32, path: &Path) -> Result<()> {
    let got = be_u32(bytes, 0, path)?;
    if got != want {
        return Err(Error::parse(
            path,
            format!("bad magic number 0x{got:08x} at offset 0, expected 0x{want:08x}"),
        ));
    }
    Ok(())
}

fn check_body(bytes: &[u8], header: usize, expected: usize, path: &Path) -> Result<()> {
    let end = header + expected;
    if bytes.len() < end {
        return Err(Error::parse(
            path,
            format!(
                "file is truncated: data should end at byte offset {end}, file has {} bytes",
                bytes.len()
            ),
        ));
    }
    if bytes.len() > end {
        return Err(Error::parse(
            path,
            format!("{} unexpected trailing bytes from offset {end}", bytes.len() - end),
        ));
    }
    Ok(())
}

/// Images as flattened rows scaled to [0, 1].
pub fn parse_idx_images(bytes: &[u8], path: &Path) -> Result<Vec<Vec<f64>>> {
    check_magic(bytes, IMAGE_MAGIC, path)?;
    let count = be_u32(bytes, 4, path)? as usize;
    let rows = be_u32(bytes, 8, path)? as usize;
    let cols = be_u32(bytes, 12, path)? as usize;
    if rows != IMAGE_SIDE || cols != IMAGE_SIDE {
        return Err(Error::parse(
            path,
            format!("image dimensions {rows}x{cols} at offset 8, expected 28x28"),
        ));
    }
    check_body(bytes, 16, count * IMAGE_LEN, path)?;
    Ok(bytes[16..]
        .chunks_exact(IMAGE_LEN)
        .map(|px| px.iter().map(|&b| f64::from(b) / 255.0).collect())
        .collect())
}

pub fn parse_idx_labels(bytes: &[u8], path: &Path) -> Result<Vec<usize>> {
    check_magic(bytes, LABEL_MAGIC, path)?;
    let count = be_u32(bytes, 4, path)? as usize;
    check_body(bytes, 8, count, path)?;
    Ok(bytes[8..].iter().map(|&b| usize::from(b)).collect())
}

/// Read an image file and its label file into one dataset with 10 classes.
pub fn parse_idx(
    images_path: &Path,
    labels_path: &Path,
    split: Split,
    source: Source,
) -> Result<Dataset> {
    let img_bytes = fs::read(images_path).map_err(|e| Error::io(images_path, e))?;
    let lbl_bytes = fs::read(labels_path).map_err(|e| Error::io(labels_path, e))?;
    let samples = parse_idx_images(&img_bytes, images_path)?;
    let labels = parse_idx_labels(&lbl_bytes, labels_path)?;
    if samples.len() != labels.len() {
        return Err(Error::parse(
            labels_path,
            format!(
                "label count {} at offset 4 does not match image count {}",
                labels.len(),
                samples.len()
            ),
        ));
    }
    if let Some(i) = labels.iter().position(|&l| l > 9) {
        return Err(Error::parse(
            labels_path,
            format!("label {} at byte offset {} is not a digit class", labels[i], 8 + i),
        ));
    }
    Dataset::new(samples, labels, 10, split, source)
}

/// Encode images (values in [0, 1], rounded to bytes) as an IDX image file.
pub fn encode_idx_images(images: &[Vec<f64>]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.len() * IMAGE_LEN);
    out.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
    out.extend_from_slice(&(images.len() as u32).to_be_bytes());
    out.extend_from_slice(&(IMAGE_SIDE as u32).to_be_bytes());
    out.extend_from_slice(&(IMAGE_SIDE as u32).to_be_bytes());
    for img in images {
        out.extend(img.iter().map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8));
    }
    out
}

pub fn encode_idx_labels(labels: &[usize]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend(labels.iter().map(|&l| l as u8));
    out
}
