use std::path::Path;

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::rng::{SeededRng, Stream};

use super::idx::load_idx;
use super::pgm::load_pgm_dir;

/// Labelled images of one size.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    images: Vec<GrayImage>,
    labels: Vec<usize>,
    class_names: Vec<String>,
}

impl Dataset {
    pub fn new(images: Vec<GrayImage>, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::CountMismatch {
                images: images.len(),
                labels: labels.len(),
            });
        }
        let Some(first) = images.first() else {
            return Err(Error::InconsistentDataset("dataset holds no images".into()));
        };
        let size = (first.width(), first.height());
        if let Some(img) = images.iter().find(|i| (i.width(), i.height()) != size) {
            return Err(Error::InconsistentDataset(format!(
                "mixed image sizes {}x{} and {}x{}",
                size.0,
                size.1,
                img.width(),
                img.height()
            )));
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::InconsistentDataset(format!(
                "label {l} but only {} class names",
                class_names.len()
            )));
        }
        Ok(Self {
            images,
            labels,
            class_names,
        })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[GrayImage] {
        &self.images
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn width(&self) -> usize {
        self.images[0].width()
    }

    pub fn height(&self) -> usize {
        self.images[0].height()
    }

    /// Examples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&i) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::OutOfRange {
                index: i,
                extent: self.len(),
            });
        }
        Self::new(
            indices.iter().map(|&i| self.images[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
            self.class_names.clone(),
        )
    }

    /// The first `n` examples (all of them if `n >= len`).
    pub fn take(&self, n: usize) -> Result<Self> {
        let indices: Vec<usize> = (0..n.min(self.len())).collect();
        self.subset(&indices)
    }

    /// Examples per class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

/// Shuffles `0..len` with `seed` and cuts it into a training part of
/// `round(len * train_fraction)` indices and a test part with the rest.
/// Both parts keep the shuffled order.
pub fn split_indices(len: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..=1.0).contains(&train_fraction) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must be in [0, 1], got {train_fraction}"
        )));
    }
    let mut order: Vec<usize> = (0..len).collect();
    SeededRng::stream(seed, Stream::Split).shuffle(&mut order);
    let cut = (len as f64 * train_fraction).round() as usize;
    let test = order.split_off(cut);
    Ok((order, test))
}

/// A training and a test set.
#[derive(Debug, Clone)]
pub struct Splits {
    pub train: Dataset,
    pub test: Dataset,
    /// Whether the split came with the data rather than from
    /// [`split_indices`].
    pub canonical: bool,
}

impl Splits {
    /// Opens a dataset directory, recognised by its contents:
    ///
    /// * `train-images-idx3-ubyte`, `train-labels-idx1-ubyte`,
    ///   `t10k-images-idx3-ubyte`, `t10k-labels-idx1-ubyte`: IDX files with
    ///   their own train/test split;
    /// * `images-idx3-ubyte`, `labels-idx1-ubyte`: one IDX pair, split 8:2;
    /// * otherwise one subdirectory of `.pgm` files per class, split 8:2.
    ///
    /// The 8:2 splits are shuffled with `split_seed`.
    pub fn open(dir: impl AsRef<Path>, split_seed: u64) -> Result<Self> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(Error::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "dataset directory not found"),
            ));
        }
        let has = |name: &str| dir.join(name).is_file();
        if has("train-images-idx3-ubyte") {
            let train = load_idx(dir.join("train-images-idx3-ubyte"), dir.join("train-labels-idx1-ubyte"))?;
            let test = load_idx(dir.join("t10k-images-idx3-ubyte"), dir.join("t10k-labels-idx1-ubyte"))?;
            let classes = train.num_classes().max(test.num_classes());
            let names: Vec<String> = (0..classes).map(|c| c.to_string()).collect();
            return Ok(Self {
                train: Dataset::new(train.images, train.labels, names.clone())?,
                test: Dataset::new(test.images, test.labels, names)?,
                canonical: true,
            });
        }
        let all = if has("images-idx3-ubyte") {
            load_idx(dir.join("images-idx3-ubyte"), dir.join("labels-idx1-ubyte"))?
        } else {
            load_pgm_dir(dir)?
        };
        Self::from_split(&all, split_seed)
    }

    /// Splits one dataset 8:2.
    pub fn from_split(all: &Dataset, split_seed: u64) -> Result<Self> {
        let (train, test) = split_indices(all.len(), 0.8, split_seed)?;
        if train.is_empty() || test.is_empty() {
            return Err(Error::InconsistentDataset(format!(
                "{} examples are too few for an 8:2 split",
                all.len()
            )));
        }
        Ok(Self {
            train: all.subset(&train)?,
            test: all.subset(&test)?,
            canonical: false,
        })
    }

    /// Keeps at most the first `train` training and `test` test examples.
    pub fn limit(self, train: Option<usize>, test: Option<usize>) -> Result<Self> {
        Ok(Self {
            train: match train {
                Some(n) => self.train.take(n)?,
                None => self.train,
            },
            test: match test {
                Some(n) => self.test.take(n)?,
                None => self.test,
            },
            canonical: self.canonical,
        })
    }
}
