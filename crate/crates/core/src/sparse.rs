//! Filter-based sparse bundling.
//!
//! A [`SparseBasis`] is `d` distinct positions in `0..n` (plus one sign per
//! position). Bundling the integer element `s` touches the `d` positions
//! `(indices[j] + s) mod n`: a Bloom-filter accumulator sets them, a
//! count-sketch accumulator adds `signs[j]` to them. The finalized vector
//! approximates the majority bundle of `permute(basis, s)` over the set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hv::{tail_mask, words_for, BinaryHypervector};
use crate::rng::SeededRng;

/// Default number of positions touched per bundled element.
pub const DEFAULT_DENSITY: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Bloom,
    CountSketch,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Bloom => "bloom",
            Backend::CountSketch => "count-sketch",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bloom" => Ok(Backend::Bloom),
            "count-sketch" | "countsketch" | "cs" => Ok(Backend::CountSketch),
            other => Err(Error::InvalidArgument(format!("unknown backend `{other}`"))),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBasis {
    dim: usize,
    indices: Vec<u32>,
    signs: Vec<i8>,
    backend: Backend,
}

impl SparseBasis {
    /// Draws `density` distinct indices, then `density` signs (one output
    /// per sign, low bit 1 meaning +1). Signs are drawn for both backends so
    /// that the indices do not depend on the backend.
    pub fn generate(rng: &mut SeededRng, dim: usize, density: usize, backend: Backend) -> Result<Self> {
        check_density(dim, density)?;
        let indices = rng.distinct(dim, density);
        let signs = (0..density)
            .map(|_| if rng.next_u64() & 1 == 1 { 1 } else { -1 })
            .collect();
        Self::new(dim, indices, signs, backend)
    }

    pub fn new(dim: usize, indices: Vec<u32>, signs: Vec<i8>, backend: Backend) -> Result<Self> {
        check_density(dim, indices.len())?;
        if signs.len() != indices.len() {
            return Err(Error::InvalidArgument(format!(
                "{} signs for {} indices",
                signs.len(),
                indices.len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("signs must be +1 or -1".into()));
        }
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("sparse indices must be distinct".into()));
        }
        if sorted.last().is_some_and(|&i| i as usize >= dim) {
            return Err(Error::InvalidArgument(format!(
                "sparse index out of range for dimension {dim}"
            )));
        }
        Ok(Self {
            dim,
            indices,
            signs,
            backend,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn density(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn with_backend(&self, backend: Backend) -> Self {
        Self {
            backend,
            ..self.clone()
        }
    }

    #[inline]
    fn position(&self, j: usize, s: u64) -> usize {
        ((u64::from(self.indices[j]) + s) % self.dim as u64) as usize
    }

    /// The `d` positions an element touches, in basis order.
    pub fn positions(&self, s: u64) -> impl Iterator<Item = usize> + '_ {
        (0..self.density()).map(move |j| self.position(j, s))
    }

    /// First half of bundling `elements` straight into packed words,
    /// reusing `scratch` between calls; [`Self::quantize`] completes it.
    /// Together they are bitwise equal to [`sparse_bundle`]. Bloom writes
    /// its bits into `out`; count-sketch adds the signs into `scratch`.
    pub(crate) fn scatter(&self, elements: &[u32], scratch: &mut SparseScratch, out: &mut [u64]) {
        debug_assert_eq!(out.len(), words_for(self.dim));
        match self.backend {
            Backend::Bloom => {
                out.fill(0);
                for &s in elements {
                    for p in self.positions(u64::from(s)) {
                        out[p / 64] |= 1u64 << (p % 64);
                    }
                }
            }
            Backend::CountSketch => {
                let values = scratch.values(self.dim);
                for &s in elements {
                    for (j, p) in self.positions(u64::from(s)).enumerate() {
                        values[p] += i32::from(self.signs[j]);
                    }
                }
            }
        }
    }

    /// Count-sketch finalization of the sums left by [`Self::scatter`]:
    /// writes `sum >= 0` into `out` and zeroes `scratch` again. Only
    /// positions touched by `elements` can be negative, so only those are
    /// visited. No-op for Bloom.
    pub(crate) fn quantize(&self, elements: &[u32], scratch: &mut SparseScratch, out: &mut [u64]) {
        if self.backend == Backend::Bloom {
            return;
        }
        let values = scratch.values(self.dim);
        out.fill(u64::MAX);
        if let Some(last) = out.last_mut() {
            *last &= tail_mask(self.dim);
        }
        for &s in elements {
            for p in self.positions(u64::from(s)) {
                if values[p] < 0 {
                    out[p / 64] &= !(1u64 << (p % 64));
                }
            }
        }
        for &s in elements {
            for p in self.positions(u64::from(s)) {
                values[p] = 0;
            }
        }
    }
}

fn check_density(dim: usize, density: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidDimension("dimension must be positive".into()));
    }
    if density == 0 || density > dim {
        return Err(Error::InvalidArgument(format!(
            "density must be in 1..={dim}, got {density}"
        )));
    }
    Ok(())
}

/// Reusable all-zero count buffer for [`SparseBasis::scatter`].
#[derive(Debug, Default)]
pub(crate) struct SparseScratch {
    values: Vec<i32>,
}

impl SparseScratch {
    fn values(&mut self, dim: usize) -> &mut [i32] {
        if self.values.len() != dim {
            self.values = vec![0; dim];
        }
        &mut self.values
    }
}

/// Sum vector under construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SparseAccumulator {
    Bloom {
        bits: BinaryHypervector,
        elements: u64,
    },
    /// Counts are `i32`: one image can bin more elements than `i8` (or
    /// `i16`, for large frames) can count.
    CountSketch {
        values: Vec<i32>,
        elements: u64,
    },
}

impl SparseAccumulator {
    pub fn new(basis: &SparseBasis) -> Self {
        match basis.backend {
            Backend::Bloom => SparseAccumulator::Bloom {
                bits: BinaryHypervector::zeros(basis.dim).expect("basis dim > 0"),
                elements: 0,
            },
            Backend::CountSketch => SparseAccumulator::CountSketch {
                values: vec![0; basis.dim],
                elements: 0,
            },
        }
    }

    pub fn element_count(&self) -> u64 {
        match self {
            SparseAccumulator::Bloom { elements, .. } | SparseAccumulator::CountSketch { elements, .. } => *elements,
        }
    }

    /// Bundles one element; returns the number of positions updated.
    pub fn add(&mut self, basis: &SparseBasis, s: u64) -> Result<usize> {
        match self {
            SparseAccumulator::Bloom { bits, elements } => {
                if basis.backend != Backend::Bloom || bits.dim() != basis.dim {
                    return Err(mismatch(basis));
                }
                let words = bits.words_mut();
                for p in basis.positions(s) {
                    words[p / 64] |= 1u64 << (p % 64);
                }
                *elements += 1;
            }
            SparseAccumulator::CountSketch { values, elements } => {
                if basis.backend != Backend::CountSketch || values.len() != basis.dim {
                    return Err(mismatch(basis));
                }
                for (j, p) in basis.positions(s).enumerate() {
                    values[p] += i32::from(basis.signs[j]);
                }
                *elements += 1;
            }
        }
        Ok(basis.density())
    }

    /// Bloom: the bits as they are. Count-sketch: bit `i` is one iff
    /// `values[i] >= 0`, so untouched positions finalize to one.
    pub fn finalize(&self) -> BinaryHypervector {
        match self {
            SparseAccumulator::Bloom { bits, .. } => bits.clone(),
            SparseAccumulator::CountSketch { values, .. } => {
                let mut words = vec![0u64; words_for(values.len())];
                for (i, &v) in values.iter().enumerate() {
                    if v >= 0 {
                        words[i / 64] |= 1u64 << (i % 64);
                    }
                }
                BinaryHypervector::from_words(values.len(), words).expect("packed from values")
            }
        }
    }
}

fn mismatch(basis: &SparseBasis) -> Error {
    Error::InvalidArgument(format!(
        "accumulator does not match a {} basis of dimension {}",
        basis.backend, basis.dim
    ))
}

/// Bundles a set of integers: new accumulator, one update per element,
/// finalize.
pub fn sparse_bundle<I>(basis: &SparseBasis, elements: I) -> BinaryHypervector
where
    I: IntoIterator<Item = u64>,
{
    let mut acc = SparseAccumulator::new(basis);
    for s in elements {
        acc.add(basis, s).expect("accumulator built from this basis");
    }
    acc.finalize()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(backend: Backend) -> SparseBasis {
        SparseBasis::generate(&mut SeededRng::new(12), 10_000, DEFAULT_DENSITY, backend).unwrap()
    }

    #[test]
    fn basis_validation() {
        assert!(SparseBasis::new(10, vec![1, 1], vec![1, 1], Backend::Bloom).is_err());
        assert!(SparseBasis::new(10, vec![1, 10], vec![1, 1], Backend::Bloom).is_err());
        assert!(SparseBasis::new(10, vec![1, 2], vec![1, 0], Backend::Bloom).is_err());
        assert!(SparseBasis::new(10, vec![1, 2], vec![1], Backend::Bloom).is_err());
        assert!(SparseBasis::generate(&mut SeededRng::new(1), 5, 6, Backend::Bloom).is_err());
        assert!(SparseBasis::generate(&mut SeededRng::new(1), 5, 0, Backend::Bloom).is_err());
    }

    #[test]
    fn bloom_single_element_sets_d_bits() {
        let b = basis(Backend::Bloom);
        let hv = sparse_bundle(&b, [12_345]);
        assert_eq!(hv.count_ones(), 20);
        assert_eq!(sparse_bundle(&b, []).count_ones(), 0);
    }

    #[test]
    fn count_sketch_repeated_element() {
        let b = basis(Backend::CountSketch);
        let mut acc = SparseAccumulator::new(&b);
        assert_eq!(acc.add(&b, 7).unwrap(), 20);
        acc.add(&b, 7).unwrap();
        let SparseAccumulator::CountSketch { values, elements } = &acc else {
            unreachable!()
        };
        assert_eq!(*elements, 2);
        for (j, p) in b.positions(7).enumerate() {
            assert_eq!(values[p], 2 * i32::from(b.signs()[j]));
        }
        assert_eq!(values.iter().filter(|&&v| v != 0).count(), 20);
    }

    #[test]
    fn count_sketch_empty_finalizes_to_ones() {
        let b = basis(Backend::CountSketch);
        let hv = sparse_bundle(&b, []);
        assert_eq!(hv.count_ones(), 10_000);
        assert!(hv.padding_is_clear());
    }

    #[test]
    fn backend_mismatch_rejected() {
        let bloom = basis(Backend::Bloom);
        let cs = bloom.with_backend(Backend::CountSketch);
        let mut acc = SparseAccumulator::new(&bloom);
        assert!(acc.add(&cs, 1).is_err());
    }

    #[test]
    fn scatter_then_quantize_matches_reference() {
        for backend in [Backend::Bloom, Backend::CountSketch] {
            let b = basis(backend);
            let mut scratch = SparseScratch::default();
            let mut rng = SeededRng::new(3);
            for size in [0usize, 1, 5, 300, 2000] {
                let elems: Vec<u32> = (0..size).map(|_| rng.below(19_200) as u32).collect();
                let mut words = vec![0u64; words_for(10_000)];
                b.scatter(&elems, &mut scratch, &mut words);
                b.quantize(&elems, &mut scratch, &mut words);
                let reference = sparse_bundle(&b, elems.iter().map(|&e| u64::from(e)));
                assert_eq!(words, reference.words(), "{backend} size {size}");
            }
        }
    }
}
