//! Item memory, training, and nearest-prototype inference.
//!
//! Each class keeps a real-valued prototype used during training and a
//! binary prototype used for inference. Encodings enter the real
//! prototypes in bipolar form (bit 0 as -1, bit 1 as +1) and a binary
//! prototype has a one wherever its real prototype is `>= 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hv::{hamming_bits, BinaryHypervector};
use crate::rng::{SeededRng, Stream};

/// Scale of the correction applied on a misclassification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateWeighting {
    /// Both prototypes move by `lr * bipolar(x)`.
    #[default]
    Flat,
    /// Each prototype `p` moves by `lr * (1 - cos(p, x)) * bipolar(x)`,
    /// where for binary vectors `1 - cos = 2 * hamming(p, x)`.
    Similarity,
}

/// When binary prototypes are re-derived from the real ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binarization {
    /// After every update, so each prediction sees the latest model.
    #[default]
    PerUpdate,
    /// Once at the end of each epoch.
    PerEpoch,
}

macro_rules! named_enum {
    ($ty:ty, $($variant:path => $name:literal),+) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self {
                    $($variant => $name),+
                }
            }
        }

        impl std::str::FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($variant),)+
                    other => Err(Error::InvalidArgument(format!(
                        concat!("unknown ", stringify!($ty), " `{}`"),
                        other
                    ))),
                }
            }
        }

        impl std::fmt::Display for $ty {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

named_enum!(UpdateWeighting, UpdateWeighting::Flat => "flat", UpdateWeighting::Similarity => "similarity");
named_enum!(Binarization, Binarization::PerUpdate => "per-update", Binarization::PerEpoch => "per-epoch");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub shuffle_seed: u64,
    /// Stop after this many consecutive epochs without a gain in training
    /// accuracy.
    pub early_stop_patience: Option<usize>,
    pub weighting: UpdateWeighting,
    pub binarization: Binarization,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20,
            learning_rate: 1.0,
            shuffle_seed: crate::encoder::DEFAULT_SEED,
            early_stop_patience: None,
            weighting: UpdateWeighting::Flat,
            binarization: Binarization::PerUpdate,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1".into()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be a finite non-negative number, got {}",
                self.learning_rate
            )));
        }
        if self.early_stop_patience == Some(0) {
            return Err(Error::InvalidArgument("early-stop patience must be at least 1".into()));
        }
        Ok(())
    }
}

/// Statistics of one training epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Misclassified examples, each of which triggered one update.
    pub updates: usize,
    /// Fraction of examples classified correctly as they were visited.
    pub train_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: usize,
    /// Normalized Hamming distance to every class prototype.
    pub distances: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItemMemory {
    classes: Vec<String>,
    binary: Vec<BinaryHypervector>,
    /// Empty for a memory loaded from binary prototypes alone.
    real: Vec<Vec<f64>>,
}

impl ItemMemory {
    /// Memory over fixed binary prototypes, with no training state.
    pub fn from_prototypes(classes: Vec<String>, prototypes: Vec<BinaryHypervector>) -> Result<Self> {
        if prototypes.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "an item memory needs at least 2 classes, got {}",
                prototypes.len()
            )));
        }
        if classes.len() != prototypes.len() {
            return Err(Error::InvalidArgument(format!(
                "{} class names for {} prototypes",
                classes.len(),
                prototypes.len()
            )));
        }
        let dim = prototypes[0].dim();
        if let Some(p) = prototypes.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: p.dim(),
            });
        }
        Ok(Self {
            classes,
            binary: prototypes,
            real: Vec::new(),
        })
    }

    pub fn num_classes(&self) -> usize {
        self.binary.len()
    }

    pub fn dim(&self) -> usize {
        self.binary[0].dim()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn prototypes(&self) -> &[BinaryHypervector] {
        &self.binary
    }

    /// Real-valued prototypes; empty unless the memory was trained here.
    pub fn real_prototypes(&self) -> &[Vec<f64>] {
        &self.real
    }

    /// Nearest prototype by Hamming distance; ties go to the lowest class
    /// index.
    pub fn predict(&self, query: &BinaryHypervector) -> Result<Prediction> {
        let bits = self.distance_bits(query)?;
        let label = argmin(&bits);
        let n = self.dim() as f64;
        Ok(Prediction {
            label,
            distances: bits.iter().map(|&b| b as f64 / n).collect(),
        })
    }

    /// Labels for many queries, in parallel.
    pub fn predict_batch(&self, queries: &[BinaryHypervector]) -> Result<Vec<usize>> {
        queries
            .par_iter()
            .map(|q| self.distance_bits(q).map(|d| argmin(&d)))
            .collect()
    }

    pub fn accuracy(&self, queries: &[BinaryHypervector], labels: &[usize]) -> Result<f64> {
        check_lengths(queries, labels)?;
        if queries.is_empty() {
            return Err(Error::InvalidArgument("no queries to score".into()));
        }
        let predicted = self.predict_batch(queries)?;
        let correct = predicted.iter().zip(labels).filter(|(p, l)| p == l).count();
        Ok(correct as f64 / queries.len() as f64)
    }

    fn distance_bits(&self, query: &BinaryHypervector) -> Result<Vec<usize>> {
        self.binary.iter().map(|p| hamming_bits(p, query)).collect()
    }

    fn distance(&self, class: usize, query: &BinaryHypervector) -> usize {
        self.binary[class]
            .words()
            .iter()
            .zip(query.words())
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    fn nearest(&self, query: &BinaryHypervector) -> usize {
        let mut best = (usize::MAX, 0);
        for c in 0..self.binary.len() {
            let d = self.distance(c, query);
            if d < best.0 {
                best = (d, c);
            }
        }
        best.1
    }

    fn add_bipolar(&mut self, class: usize, x: &BinaryHypervector, scale: f64) {
        let real = &mut self.real[class];
        for (chunk, &word) in real.chunks_mut(64).zip(x.words()) {
            for (b, r) in chunk.iter_mut().enumerate() {
                *r += if word >> b & 1 == 1 { scale } else { -scale };
            }
        }
    }

    fn binarize(&mut self, class: usize) {
        let real = &self.real[class];
        let dim = real.len();
        let words = real
            .chunks(64)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u64, |w, (b, &r)| w | (u64::from(r >= 0.0) << b))
            })
            .collect();
        self.binary[class] = BinaryHypervector::from_words(dim, words).expect("chunks cover dim");
    }
}

fn argmin(distances: &[usize]) -> usize {
    let mut best = 0;
    for (c, &d) in distances.iter().enumerate() {
        if d < distances[best] {
            best = c;
        }
    }
    best
}

fn check_lengths(encoded: &[BinaryHypervector], labels: &[usize]) -> Result<()> {
    if encoded.len() != labels.len() {
        return Err(Error::CountMismatch {
            images: encoded.len(),
            labels: labels.len(),
        });
    }
    Ok(())
}

/// One-shot training: each real prototype is the bipolar sum of its
/// class's encodings.
pub fn train_bundle(encoded: &[BinaryHypervector], labels: &[usize], classes: Vec<String>) -> Result<ItemMemory> {
    check_lengths(encoded, labels)?;
    let num_classes = classes.len();
    if num_classes < 2 {
        return Err(Error::InvalidArgument(format!(
            "training needs at least 2 classes, got {num_classes}"
        )));
    }
    let Some(first) = encoded.first() else {
        return Err(Error::InvalidArgument("no training examples".into()));
    };
    let dim = first.dim();
    let mut seen = vec![false; num_classes];
    for (x, &label) in encoded.iter().zip(labels) {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: x.dim(),
            });
        }
        if label >= num_classes {
            return Err(Error::OutOfRange {
                index: label,
                extent: num_classes,
            });
        }
        seen[label] = true;
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::MissingClass(missing));
    }

    let mut memory = ItemMemory {
        classes,
        binary: vec![BinaryHypervector::zeros(dim)?; num_classes],
        real: vec![vec![0.0; dim]; num_classes],
    };
    for (x, &label) in encoded.iter().zip(labels) {
        memory.add_bipolar(label, x, 1.0);
    }
    for c in 0..num_classes {
        memory.binarize(c);
    }
    Ok(memory)
}

/// Binary OnlineHD: start from [`train_bundle`], then for each epoch visit
/// the examples in a freshly shuffled order and, whenever the binary
/// memory misclassifies `x` of class `c` as `c'`, add `lr * bipolar(x)` to
/// prototype `c` and subtract it from `c'` (scaled per
/// [`UpdateWeighting`]), re-binarizing per [`Binarization`].
///
/// Stops early after an epoch without misclassifications, or when
/// `early_stop_patience` epochs pass without a gain in training accuracy.
pub fn train_onlinehd(
    encoded: &[BinaryHypervector],
    labels: &[usize],
    classes: Vec<String>,
    config: &TrainConfig,
) -> Result<(ItemMemory, Vec<EpochStats>)> {
    config.validate()?;
    let mut memory = train_bundle(encoded, labels, classes)?;
    let mut rng = SeededRng::stream(config.shuffle_seed, Stream::Shuffle);
    let mut order: Vec<usize> = (0..encoded.len()).collect();
    let mut log = Vec::with_capacity(config.epochs);
    let mut best = f64::NEG_INFINITY;
    let mut stale = 0;
    let n = memory.dim() as f64;
    let per_update = config.binarization == Binarization::PerUpdate;
    for epoch in 1..=config.epochs {
        rng.shuffle(&mut order);
        let mut updates = 0;
        let mut touched = vec![false; memory.num_classes()];
        for &i in &order {
            let (x, truth) = (&encoded[i], labels[i]);
            let guess = memory.nearest(x);
            if guess == truth {
                continue;
            }
            updates += 1;
            if config.learning_rate == 0.0 {
                continue;
            }
            let (w_truth, w_guess) = match config.weighting {
                UpdateWeighting::Flat => (1.0, 1.0),
                UpdateWeighting::Similarity => (
                    2.0 * memory.distance(truth, x) as f64 / n,
                    2.0 * memory.distance(guess, x) as f64 / n,
                ),
            };
            memory.add_bipolar(truth, x, config.learning_rate * w_truth);
            memory.add_bipolar(guess, x, -config.learning_rate * w_guess);
            if per_update {
                memory.binarize(truth);
                memory.binarize(guess);
            } else {
                touched[truth] = true;
                touched[guess] = true;
            }
        }
        for (c, _) in touched.iter().enumerate().filter(|(_, &t)| t) {
            memory.binarize(c);
        }
        let train_accuracy = 1.0 - updates as f64 / encoded.len() as f64;
        log.push(EpochStats {
            epoch,
            updates,
            train_accuracy,
        });
        if updates == 0 {
            break;
        }
        if train_accuracy > best {
            best = train_accuracy;
            stale = 0;
        } else {
            stale += 1;
            if config.early_stop_patience.is_some_and(|p| stale >= p) {
                break;
            }
        }
    }
    Ok((memory, log))
}
