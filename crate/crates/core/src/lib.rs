//! Image classification with binary hypervectors.
//!
//! Images are encoded into `n`-bit binary spatter code hypervectors, one
//! prototype per class is learned from the encodings, and a query is
//! assigned to the class whose prototype is nearest in Hamming distance.
//!
//! Five encoders are provided (see [`encoder`]). The default,
//! [`EncoderVariant::HyperCam`], replaces the dense per-pixel bundling with
//! a sparse filter-based bundle per pixel value, which needs no stored
//! position codebook.
//!
//! ```
//! use hyperhd::{EncoderConfig, GrayImage, ImageEncoder};
//!
//! let encoder = ImageEncoder::new(EncoderConfig::default(), 4, 4)?;
//! let img = GrayImage::new(4, 4, (0..16).map(|v| v * 16).collect())?;
//! let hv = encoder.encode(&img)?;
//! assert_eq!(hv.dim(), 10_000);
//! # Ok::<(), hyperhd::Error>(())
//! ```

pub mod accumulator;
pub mod codebook;
pub mod encoder;
pub mod error;
pub mod hv;
pub mod image;
pub mod io;
pub mod model;
pub mod report;
pub mod rng;
pub mod sparse;

pub use accumulator::{bundle, bundle_unweighted, AccumulatorVector, MajorityCounter};
pub use codebook::{PositionCodebook, ValueCodebook, LEVELS};
pub use encoder::{
    EncodeProbe, EncoderConfig, EncoderVariant, ImageEncoder, OpCounts, PhaseTimes, DEFAULT_DIM, DEFAULT_SEED,
};
pub use error::{Error, ErrorKind, Result};
pub use hv::{bind, hamming, hamming_bits, permute, random_hv, BinaryHypervector};
pub use image::GrayImage;
pub use io::{Dataset, ModelArtifact, Splits};
pub use model::{
    train_bundle, train_onlinehd, Binarization, EpochStats, ItemMemory, Prediction, TrainConfig, UpdateWeighting,
};
pub use report::{evaluate, profile, EvalReport, PhaseMillis, ProfileReport};
pub use rng::{SeededRng, Stream};
pub use sparse::{sparse_bundle, Backend, SparseAccumulator, SparseBasis, DEFAULT_DENSITY};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/hypervectors.md")]
mod book_hypervectors {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/codebooks.md")]
mod book_codebooks {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/sparse-bundling.md")]
mod book_sparse_bundling {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/encoders.md")]
mod book_encoders {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/training.md")]
mod book_training {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/datasets.md")]
mod book_datasets {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/model-files.md")]
mod book_model_files {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
