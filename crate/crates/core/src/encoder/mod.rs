//! Image encoders, from the naive pixel encoding to the sparse-bundling
//! encoder, behind one [`ImageEncoder`] type.
//!
//! | variant    | position codes                      | value codes         | bundling                      |
//! |------------|-------------------------------------|---------------------|-------------------------------|
//! | `naive`    | explicit row table, column table    | stored level table  | majority over all pixels      |
//! | `rewrite1` | permutations of one row, one column | stored level table  | majority over all pixels      |
//! | `rewrite2` | permutations of one 1-D base code   | stored level table  | majority over all pixels      |
//! | `rewrite3` | permutations of one 1-D base code   | stored level table  | per-value majority, weighted  |
//! | `hypercam` | sparse basis shifts                 | generated from flip order | sparse bundle per value, weighted |
//!
//! All variants derive their randomness from the config seed: position
//! codes from [`Stream::Positions`], the flip order from
//! [`Stream::FlipOrder`], the sparse basis from [`Stream::SparseBasis`].

mod dense;
mod hypercam;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codebook::{PositionCodebook, ValueCodebook, LEVELS};
use crate::error::{Error, Result};
use crate::hv::BinaryHypervector;
use crate::image::GrayImage;
use crate::rng::{SeededRng, Stream};
use crate::sparse::{Backend, SparseBasis, DEFAULT_DENSITY};

pub const DEFAULT_DIM: usize = 10_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncoderVariant {
    Naive,
    Rewrite1,
    Rewrite2,
    Rewrite3,
    HyperCam,
}

impl EncoderVariant {
    pub const ALL: [EncoderVariant; 5] = [
        EncoderVariant::Naive,
        EncoderVariant::Rewrite1,
        EncoderVariant::Rewrite2,
        EncoderVariant::Rewrite3,
        EncoderVariant::HyperCam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EncoderVariant::Naive => "naive",
            EncoderVariant::Rewrite1 => "rewrite1",
            EncoderVariant::Rewrite2 => "rewrite2",
            EncoderVariant::Rewrite3 => "rewrite3",
            EncoderVariant::HyperCam => "hypercam",
        }
    }

    pub fn tag(self) -> u8 {
        self as u8
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.get(usize::from(tag)).copied()
    }
}

impl FromStr for EncoderVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown encoder `{s}`")))
    }
}

impl fmt::Display for EncoderVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub variant: EncoderVariant,
    /// Only consulted by the `hypercam` variant.
    pub backend: Backend,
    pub dim: usize,
    pub density: usize,
    pub seed: u64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            variant: EncoderVariant::HyperCam,
            backend: Backend::CountSketch,
            dim: DEFAULT_DIM,
            density: DEFAULT_DENSITY,
            seed: DEFAULT_SEED,
        }
    }
}

impl EncoderConfig {
    pub fn new(variant: EncoderVariant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    pub fn with_density(mut self, density: usize) -> Self {
        self.density = density;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Human-readable label, e.g. `hypercam/count-sketch`.
    pub fn label(&self) -> String {
        match self.variant {
            EncoderVariant::HyperCam => format!("{}/{}", self.variant, self.backend),
            v => v.to_string(),
        }
    }
}

/// Operation counts of one or more encode calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    /// Basis hypervectors the encoder keeps in memory.
    pub codebook_vectors: u64,
    pub binds: u64,
    pub bundles: u64,
    pub sparse_bundles: u64,
}

impl OpCounts {
    pub fn as_tuple(&self) -> (u64, u64, u64, u64) {
        (self.codebook_vectors, self.binds, self.bundles, self.sparse_bundles)
    }

    /// Sums operation counts; the codebook size is a property of the
    /// encoder, not of a call, so it is kept rather than added.
    pub fn accumulate(&mut self, other: &OpCounts) {
        self.codebook_vectors = other.codebook_vectors;
        self.binds += other.binds;
        self.bundles += other.bundles;
        self.sparse_bundles += other.sparse_bundles;
    }
}

/// Wall time spent in each encoding phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    /// Sparse binning pass (hypercam only).
    pub binning: Duration,
    /// Count-sketch finalization to binary; `None` when the encoder has no
    /// such phase.
    pub quantize: Option<Duration>,
    pub bind_sum: Duration,
    pub majority: Duration,
}

impl PhaseTimes {
    pub fn total(&self) -> Duration {
        self.binning + self.quantize.unwrap_or_default() + self.bind_sum + self.majority
    }

    pub fn accumulate(&mut self, other: &PhaseTimes) {
        self.binning += other.binning;
        self.quantize = match (self.quantize, other.quantize) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or_default() + b.unwrap_or_default()),
        };
        self.bind_sum += other.bind_sum;
        self.majority += other.majority;
    }
}

/// Instrumentation sink for encode calls.
#[derive(Debug, Clone, Default)]
pub struct EncodeProbe {
    pub counts: OpCounts,
    pub phases: PhaseTimes,
    timing: bool,
}

impl EncodeProbe {
    /// Counts operations only.
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts operations and records per-phase wall time.
    pub fn timed() -> Self {
        Self {
            timing: true,
            ..Self::default()
        }
    }

    fn start(&self) -> Option<Instant> {
        self.timing.then(Instant::now)
    }

    fn lap(&self, since: Option<Instant>) -> Duration {
        since.map(|t| t.elapsed()).unwrap_or_default()
    }
}

#[derive(Debug, Clone)]
enum Positions {
    RowColumn {
        rows: PositionCodebook,
        columns: PositionCodebook,
    },
    Coalesced(PositionCodebook),
    Sparse,
}

/// An encoder bound to one image size and one set of codebooks.
#[derive(Debug, Clone)]
pub struct ImageEncoder {
    config: EncoderConfig,
    width: usize,
    height: usize,
    positions: Positions,
    values: ValueCodebook,
    sparse: SparseBasis,
}

impl ImageEncoder {
    /// Generates every codebook from `config.seed`.
    pub fn new(config: EncoderConfig, width: usize, height: usize) -> Result<Self> {
        let values = ValueCodebook::generate(&mut SeededRng::stream(config.seed, Stream::FlipOrder), config.dim)?;
        let sparse = SparseBasis::generate(
            &mut SeededRng::stream(config.seed, Stream::SparseBasis),
            config.dim,
            config.density,
            config.backend,
        )?;
        Self::with_codebooks(config, width, height, values, sparse)
    }

    /// Uses the given value codebook and sparse basis; position codes are
    /// regenerated from the seed.
    pub fn with_codebooks(
        config: EncoderConfig,
        width: usize,
        height: usize,
        values: ValueCodebook,
        sparse: SparseBasis,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimension(format!("image size {width}x{height}")));
        }
        if values.dim() != config.dim || sparse.dim() != config.dim {
            return Err(Error::DimensionMismatch {
                expected: config.dim,
                actual: if values.dim() != config.dim {
                    values.dim()
                } else {
                    sparse.dim()
                },
            });
        }
        if sparse.density() != config.density {
            return Err(Error::InvalidArgument(format!(
                "sparse basis density {} differs from configured {}",
                sparse.density(),
                config.density
            )));
        }
        let sparse = sparse.with_backend(config.backend);
        let mut rng = SeededRng::stream(config.seed, Stream::Positions);
        let n = config.dim;
        let positions = match config.variant {
            EncoderVariant::Naive => Positions::RowColumn {
                rows: PositionCodebook::explicit(&mut rng, n, height)?,
                columns: PositionCodebook::explicit(&mut rng, n, width)?,
            },
            EncoderVariant::Rewrite1 => Positions::RowColumn {
                rows: PositionCodebook::permuted(&mut rng, n, height)?,
                columns: PositionCodebook::permuted(&mut rng, n, width)?,
            },
            EncoderVariant::Rewrite2 | EncoderVariant::Rewrite3 => {
                Positions::Coalesced(PositionCodebook::permuted(&mut rng, n, width * height)?)
            }
            EncoderVariant::HyperCam => Positions::Sparse,
        };
        Ok(Self {
            config,
            width,
            height,
            positions,
            values,
            sparse,
        })
    }

    pub fn config(&self) -> &EncoderConfig {
        &self.config
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn value_codebook(&self) -> &ValueCodebook {
        &self.values
    }

    pub fn sparse_basis(&self) -> &SparseBasis {
        &self.sparse
    }

    /// Basis hypervectors this encoder needs in memory: position codes
    /// plus, for the dense variants, the 256-entry value table. The
    /// sparse-bundling encoder generates value codes on the fly and its
    /// position codes stand in for `ceil(wh / n)` permuted bases.
    pub fn codebook_vectors(&self) -> u64 {
        let positions = match &self.positions {
            Positions::RowColumn { rows, columns } => rows.stored_vectors() + columns.stored_vectors(),
            Positions::Coalesced(cb) => cb.stored_vectors(),
            Positions::Sparse => return (self.width * self.height).div_ceil(self.config.dim) as u64,
        };
        (positions + LEVELS) as u64
    }

    /// Position code of pixel index `k` for the dense variants.
    pub fn position_code(&self, k: usize) -> Result<BinaryHypervector> {
        match &self.positions {
            Positions::RowColumn { rows, columns } => {
                if k >= self.width * self.height {
                    return Err(Error::OutOfRange {
                        index: k,
                        extent: self.width * self.height,
                    });
                }
                let r = rows.position_code(k / self.width)?;
                let c = columns.position_code(k % self.width)?;
                crate::hv::bind(&r, &c)
            }
            Positions::Coalesced(cb) => cb.position_code(k),
            Positions::Sparse => Err(Error::InvalidArgument(
                "the sparse-bundling encoder has no dense position codes".into(),
            )),
        }
    }

    fn check_image(&self, img: &GrayImage) -> Result<()> {
        if img.width() != self.width || img.height() != self.height {
            return Err(Error::InvalidArgument(format!(
                "image is {}x{}, encoder expects {}x{}",
                img.width(),
                img.height(),
                self.width,
                self.height
            )));
        }
        Ok(())
    }

    pub fn encode(&self, img: &GrayImage) -> Result<BinaryHypervector> {
        self.encode_probed(img, &mut EncodeProbe::new())
    }

    /// Encodes and adds this call's operation counts (and phase times, for a
    /// timed probe) to `probe`.
    pub fn encode_probed(&self, img: &GrayImage, probe: &mut EncodeProbe) -> Result<BinaryHypervector> {
        self.check_image(img)?;
        probe.counts.codebook_vectors = self.codebook_vectors();
        match (&self.positions, self.config.variant) {
            (Positions::RowColumn { rows, columns }, _) => dense::encode_row_column(self, rows, columns, img, probe),
            (Positions::Coalesced(cb), EncoderVariant::Rewrite2) => dense::encode_coalesced(self, cb, img, probe),
            (Positions::Coalesced(cb), _) => dense::encode_factored(self, cb, img, probe),
            (Positions::Sparse, _) => Ok(hypercam::encode(self, img, probe)),
        }
    }

    /// The sparse-bundling encoder written as a direct transcription of
    /// the reference loop: 256 sum vectors, count-sketch finalization over
    /// every dimension, value codes applied by flipping bits, and a plain
    /// per-dimension weighted sum. Bitwise equal to [`ImageEncoder::encode`]
    /// and much slower; profiling uses it because its phases mirror the
    /// embedded implementation.
    pub fn encode_reference(&self, img: &GrayImage, probe: &mut EncodeProbe) -> Result<BinaryHypervector> {
        if self.config.variant != EncoderVariant::HyperCam {
            return Err(Error::InvalidArgument(
                "the reference path exists only for the hypercam encoder".into(),
            ));
        }
        self.check_image(img)?;
        probe.counts.codebook_vectors = self.codebook_vectors();
        Ok(hypercam::encode_reference(self, img, probe))
    }

    /// Encodes many images in parallel.
    pub fn encode_batch(&self, images: &[GrayImage]) -> Result<Vec<BinaryHypervector>> {
        images.par_iter().map(|img| self.encode(img)).collect()
    }
}

#[cfg(test)]
mod tests;
