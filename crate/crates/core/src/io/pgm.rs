//! Binary (P5) PGM images and class-per-subdirectory image folders.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::image::GrayImage;

use super::dataset::Dataset;

/// Parses a P5 image with `maxval <= 255`. Pixel values are taken as
/// stored.
pub fn parse_pgm(bytes: &[u8], path: &Path) -> Result<GrayImage> {
    let unsupported = |detail: String| Error::UnsupportedImage {
        path: path.into(),
        detail,
    };
    match bytes.get(..2) {
        Some(b"P5") => {}
        Some(b"P2") => return Err(unsupported("ASCII (P2) PGM is not supported".into())),
        _ => return Err(unsupported("not a binary PGM (P5) file".into())),
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(if pos >= bytes.len() {
                Error::Truncated {
                    path: path.into(),
                    detail: "incomplete PGM header".into(),
                }
            } else {
                unsupported("malformed PGM header".into())
            });
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| unsupported("PGM header field out of range".into()))?;
    }
    let [width, height, maxval] = fields;
    if maxval == 0 || maxval > 255 {
        return Err(unsupported(format!("maxval {maxval}; only 1..=255 is supported")));
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(unsupported("malformed PGM header".into()));
    }
    pos += 1;
    let len = width * height;
    let raster = bytes.get(pos..pos + len).ok_or_else(|| Error::Truncated {
        path: path.into(),
        detail: format!("{} raster bytes, expected {len}", bytes.len().saturating_sub(pos)),
    })?;
    GrayImage::new(width, height, raster.to_vec()).map_err(|e| unsupported(e.to_string()))
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes, path)
}

pub fn write_pgm(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    bytes.extend_from_slice(img.pixels());
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<Result<Vec<_>>>()?;
    entries.sort();
    Ok(entries)
}

/// Loads `dir/<class>/*.pgm`. Classes are the subdirectories in
/// lexicographic order; class `i` gets label `i`.
pub fn load_pgm_dir(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let mut names = Vec::new();
    let mut images = Vec::new();
    let mut labels = Vec::new();
    for class_dir in sorted_entries(dir)?.into_iter().filter(|p| p.is_dir()) {
        let label = names.len();
        let files: Vec<_> = sorted_entries(&class_dir)?
            .into_iter()
            .filter(|p| p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")))
            .collect();
        if files.is_empty() {
            return Err(Error::InconsistentDataset(format!(
                "class directory {} holds no .pgm files",
                class_dir.display()
            )));
        }
        for file in files {
            let img = read_pgm(&file)?;
            if let Some(first) = images.first().map(|f: &GrayImage| (f.width(), f.height())) {
                if first != (img.width(), img.height()) {
                    return Err(Error::InconsistentDataset(format!(
                        "{} is {}x{}, earlier images are {}x{}",
                        file.display(),
                        img.width(),
                        img.height(),
                        first.0,
                        first.1
                    )));
                }
            }
            images.push(img);
            labels.push(label);
        }
        names.push(
            class_dir
                .file_name()
                .map_or_else(String::new, |n| n.to_string_lossy().into_owned()),
        );
    }
    if names.is_empty() {
        return Err(Error::InconsistentDataset(format!(
            "{} has no class subdirectories",
            dir.display()
        )));
    }
    Dataset::new(images, labels, names)
}
