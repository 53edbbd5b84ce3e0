//! IDX containers: a big-endian `u32` magic, one big-endian `u32` per
//! dimension, then raw `u8` data.

use std::path::Path;

use crate::error::{Error, Result};
use crate::image::GrayImage;

use super::dataset::Dataset;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn header(bytes: &[u8], path: &Path, magic: u32, dims: usize) -> Result<Vec<usize>> {
    let need = 4 * (1 + dims);
    if bytes.len() < need {
        return Err(Error::Truncated {
            path: path.into(),
            detail: format!("{} bytes, header needs {need}", bytes.len()),
        });
    }
    let word = |i: usize| u32::from_be_bytes(bytes[4 * i..4 * i + 4].try_into().expect("4 bytes"));
    let found = word(0);
    if found != magic {
        return Err(Error::BadMagic {
            path: path.into(),
            found,
            expected: magic,
        });
    }
    Ok((1..=dims).map(|i| word(i) as usize).collect())
}

fn body<'a>(bytes: &'a [u8], path: &Path, offset: usize, len: usize) -> Result<&'a [u8]> {
    bytes.get(offset..offset + len).ok_or_else(|| Error::Truncated {
        path: path.into(),
        detail: format!("{} data bytes, header declares {len}", bytes.len() - offset),
    })
}

/// Parses an image file (magic `0x00000803`, dimensions count, rows, columns).
pub fn parse_idx_images(bytes: &[u8], path: &Path) -> Result<Vec<GrayImage>> {
    let dims = header(bytes, path, IDX_IMAGES_MAGIC, 3)?;
    let (count, rows, cols) = (dims[0], dims[1], dims[2]);
    if rows == 0 || cols == 0 {
        return Err(Error::UnsupportedImage {
            path: path.into(),
            detail: format!("{cols}x{rows} images"),
        });
    }
    let size = rows * cols;
    let data = body(bytes, path, 16, count * size)?;
    data.chunks_exact(size)
        .map(|px| GrayImage::new(cols, rows, px.to_vec()))
        .collect()
}

/// Parses a label file (magic `0x00000801`, count).
pub fn parse_idx_labels(bytes: &[u8], path: &Path) -> Result<Vec<u8>> {
    let count = header(bytes, path, IDX_LABELS_MAGIC, 1)?[0];
    Ok(body(bytes, path, 8, count)?.to_vec())
}

/// Reads an image file and its label file into a dataset whose classes
/// are named `0`, `1`, ... up to the largest label.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Dataset> {
    let (images_path, labels_path) = (images_path.as_ref(), labels_path.as_ref());
    let images = parse_idx_images(&read(images_path)?, images_path)?;
    let labels = parse_idx_labels(&read(labels_path)?, labels_path)?;
    if images.len() != labels.len() {
        return Err(Error::CountMismatch {
            images: images.len(),
            labels: labels.len(),
        });
    }
    let classes = labels.iter().max().map_or(0, |&m| usize::from(m) + 1);
    let names = (0..classes).map(|c| c.to_string()).collect();
    Dataset::new(images, labels.into_iter().map(usize::from).collect(), names)
}
