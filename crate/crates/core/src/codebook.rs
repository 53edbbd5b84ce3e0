//! Basis hypervector sources: position codebooks and the level-based value
//! codebook.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::hv::{permute_into, BinaryHypervector};
use crate::rng::SeededRng;

/// Number of distinct 8-bit pixel values.
pub const LEVELS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Storage {
    /// One stored code per position.
    Explicit(Vec<BinaryHypervector>),
    /// `code(k) = permute(bases[k / n], k % n)`.
    Permuted(Vec<BinaryHypervector>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionCodebook {
    dim: usize,
    extent: usize,
    storage: Storage,
}

impl PositionCodebook {
    /// `extent` independent random codes drawn from `rng`, in position order.
    pub fn explicit(rng: &mut SeededRng, dim: usize, extent: usize) -> Result<Self> {
        check_extent(extent)?;
        let codes = (0..extent)
            .map(|_| BinaryHypervector::random(rng, dim))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim,
            extent,
            storage: Storage::Explicit(codes),
        })
    }

    /// `ceil(extent / dim)` random base codes; the rest are permutations.
    pub fn permuted(rng: &mut SeededRng, dim: usize, extent: usize) -> Result<Self> {
        check_extent(extent)?;
        let bases = (0..extent.div_ceil(dim))
            .map(|_| BinaryHypervector::random(rng, dim))
            .collect::<Result<Vec<_>>>()?;
        Self::from_bases(bases, extent)
    }

    pub fn from_bases(bases: Vec<BinaryHypervector>, extent: usize) -> Result<Self> {
        check_extent(extent)?;
        let dim = bases
            .first()
            .ok_or_else(|| Error::InvalidArgument("no base codes".into()))?
            .dim();
        if bases.len() != extent.div_ceil(dim) {
            return Err(Error::InvalidArgument(format!(
                "extent {extent} at dimension {dim} needs {} base codes, got {}",
                extent.div_ceil(dim),
                bases.len()
            )));
        }
        if bases.iter().any(|b| b.dim() != dim) {
            return Err(Error::InvalidArgument("base codes differ in dimension".into()));
        }
        Ok(Self {
            dim,
            extent,
            storage: Storage::Permuted(bases),
        })
    }

    /// Explicit table holding exactly the codes a permutation-derived
    /// codebook would compute.
    pub fn to_explicit(&self) -> Self {
        let codes = (0..self.extent)
            .map(|k| self.position_code(k).expect("k < extent"))
            .collect();
        Self {
            dim: self.dim,
            extent: self.extent,
            storage: Storage::Explicit(codes),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> usize {
        self.extent
    }

    pub fn is_permutation_derived(&self) -> bool {
        matches!(self.storage, Storage::Permuted(_))
    }

    /// Hypervectors actually held in memory.
    pub fn stored_vectors(&self) -> usize {
        match &self.storage {
            Storage::Explicit(v) | Storage::Permuted(v) => v.len(),
        }
    }

    pub fn base_codes(&self) -> &[BinaryHypervector] {
        match &self.storage {
            Storage::Explicit(v) | Storage::Permuted(v) => v,
        }
    }

    pub fn position_code(&self, k: usize) -> Result<BinaryHypervector> {
        let mut out = BinaryHypervector::zeros(self.dim)?;
        self.position_code_into(k, out.words_mut())?;
        Ok(out)
    }

    pub(crate) fn position_code_into(&self, k: usize, out: &mut [u64]) -> Result<()> {
        if k >= self.extent {
            return Err(Error::OutOfRange {
                index: k,
                extent: self.extent,
            });
        }
        match &self.storage {
            Storage::Explicit(codes) => out.copy_from_slice(codes[k].words()),
            Storage::Permuted(bases) => permute_into(&bases[k / self.dim], k % self.dim, out),
        }
        Ok(())
    }
}

fn check_extent(extent: usize) -> Result<()> {
    if extent == 0 {
        return Err(Error::InvalidArgument("codebook extent must be positive".into()));
    }
    Ok(())
}

/// Level-based value codebook generated from a stored bit-flip order.
///
/// `V(v)` has ones exactly at `flip_order[0 .. v * step]` with
/// `step = floor(n / 256)`, so `V(0)` is all zeros and levels nest.
#[derive(Debug, Clone)]
pub struct ValueCodebook {
    flip_order: Vec<u32>,
    step: usize,
    table: OnceLock<Vec<BinaryHypervector>>,
}

impl PartialEq for ValueCodebook {
    fn eq(&self, other: &Self) -> bool {
        self.flip_order == other.flip_order
    }
}

impl Eq for ValueCodebook {}

impl ValueCodebook {
    /// Draws a uniformly random flip order for dimension `dim`.
    pub fn generate(rng: &mut SeededRng, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("dimension must be positive".into()));
        }
        Self::from_flip_order(rng.permutation(dim))
    }

    /// Rebuilds a codebook from a stored flip order, which must be a
    /// permutation of `0..n`.
    pub fn from_flip_order(flip_order: Vec<u32>) -> Result<Self> {
        let n = flip_order.len();
        if n == 0 {
            return Err(Error::InvalidDimension("empty flip order".into()));
        }
        let mut seen = vec![false; n];
        for &i in &flip_order {
            let slot = seen
                .get_mut(i as usize)
                .ok_or_else(|| Error::InvalidArgument(format!("flip index {i} >= {n}")))?;
            if std::mem::replace(slot, true) {
                return Err(Error::InvalidArgument(format!("flip index {i} repeated")));
            }
        }
        Ok(Self {
            flip_order,
            step: n / LEVELS,
            table: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.flip_order.len()
    }

    /// Bits flipped per level, `floor(n / 256)`.
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn flip_order(&self) -> &[u32] {
        &self.flip_order
    }

    /// Number of one-bits in `V(v)`.
    pub fn flips_for(&self, v: u8) -> usize {
        usize::from(v) * self.step
    }

    pub fn value_code(&self, v: usize) -> Result<BinaryHypervector> {
        let v = check_level(v)?;
        let mut hv = BinaryHypervector::zeros(self.dim())?;
        for &i in &self.flip_order[..self.flips_for(v)] {
            hv.set(i as usize, true);
        }
        Ok(hv)
    }

    /// `bind(value_code(v), x)` computed by flipping only the first
    /// `v * step` flip-order positions of `x`.
    pub fn value_bind_fused(&self, v: usize, x: &BinaryHypervector) -> Result<BinaryHypervector> {
        let v = check_level(v)?;
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.dim(),
            });
        }
        let mut out = x.clone();
        self.flip_in_place(v, &mut out);
        Ok(out)
    }

    /// Flips the `V(v)` positions of `x`; returns how many were touched.
    pub(crate) fn flip_in_place(&self, v: u8, x: &mut BinaryHypervector) -> usize {
        let flips = &self.flip_order[..self.flips_for(v)];
        let words = x.words_mut();
        for &i in flips {
            words[i as usize / 64] ^= 1u64 << (i % 64);
        }
        flips.len()
    }

    /// All 256 value codes, materialized once and cached.
    pub fn table(&self) -> &[BinaryHypervector] {
        self.table.get_or_init(|| {
            let mut codes = Vec::with_capacity(LEVELS);
            let mut current = BinaryHypervector::zeros(self.dim()).expect("dim > 0");
            codes.push(current.clone());
            for v in 1..LEVELS {
                for &i in &self.flip_order[(v - 1) * self.step..v * self.step] {
                    current.set(i as usize, true);
                }
                codes.push(current.clone());
            }
            codes
        })
    }
}

fn check_level(v: usize) -> Result<u8> {
    u8::try_from(v).map_err(|_| Error::OutOfRange {
        index: v,
        extent: LEVELS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hv::{bind, hamming};

    fn value_cb(seed: u64, n: usize) -> ValueCodebook {
        ValueCodebook::generate(&mut SeededRng::new(seed), n).unwrap()
    }

    #[test]
    fn level_zero_is_zero_and_top_level_popcount() {
        let cb = value_cb(1, 10_000);
        assert_eq!(cb.step(), 39);
        assert_eq!(cb.value_code(0).unwrap().count_ones(), 0);
        assert_eq!(cb.value_code(255).unwrap().count_ones(), 9945);
    }

    #[test]
    fn out_of_range_value_rejected() {
        let cb = value_cb(1, 1000);
        assert!(matches!(cb.value_code(256), Err(Error::OutOfRange { .. })));
        let x = BinaryHypervector::zeros(1000).unwrap();
        assert!(cb.value_bind_fused(300, &x).is_err());
    }

    #[test]
    fn levels_nest() {
        let cb = value_cb(2, 2048);
        for v in 1..LEVELS {
            let lo = cb.value_code(v - 1).unwrap();
            let hi = cb.value_code(v).unwrap();
            let lo_and_hi: Vec<_> = lo.words().iter().zip(hi.words()).map(|(a, b)| a & b).collect();
            assert_eq!(lo_and_hi, lo.words());
        }
    }

    #[test]
    fn table_matches_value_code() {
        let cb = value_cb(3, 1000);
        for v in [0, 1, 17, 128, 255] {
            assert_eq!(cb.table()[v], cb.value_code(v).unwrap());
        }
    }

    #[test]
    fn fused_bind_matches_explicit() {
        let cb = value_cb(4, 10_000);
        let x = BinaryHypervector::random(&mut SeededRng::new(9), 10_000).unwrap();
        assert_eq!(cb.value_bind_fused(0, &x).unwrap(), x);
        for v in [1, 128, 255] {
            let explicit = bind(&cb.value_code(v).unwrap(), &x).unwrap();
            assert_eq!(cb.value_bind_fused(v, &x).unwrap(), explicit);
        }
        let mut y = x.clone();
        assert_eq!(cb.flip_in_place(128, &mut y), 128 * 39);
    }

    #[test]
    fn level_distance_is_linear() {
        let cb = value_cb(5, 10_000);
        let d = hamming(&cb.value_code(10).unwrap(), &cb.value_code(30).unwrap()).unwrap();
        assert_eq!(d, (20 * 39) as f64 / 10_000.0);
    }

    #[test]
    fn flip_order_validation() {
        assert!(ValueCodebook::from_flip_order(vec![0, 1, 1]).is_err());
        assert!(ValueCodebook::from_flip_order(vec![0, 3, 1]).is_err());
        assert!(ValueCodebook::from_flip_order(vec![]).is_err());
        assert!(ValueCodebook::from_flip_order(vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn permuted_codebook_base_count_and_range() {
        let cb = PositionCodebook::permuted(&mut SeededRng::new(1), 10_000, 19_200).unwrap();
        assert_eq!(cb.stored_vectors(), 2);
        assert_eq!(cb.position_code(0).unwrap(), cb.base_codes()[0]);
        assert_eq!(cb.position_code(10_000).unwrap(), cb.base_codes()[1]);
        assert!(matches!(cb.position_code(19_200), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn permuted_agrees_with_explicit_table() {
        let cb = PositionCodebook::permuted(&mut SeededRng::new(8), 64, 300).unwrap();
        let table = cb.to_explicit();
        assert!(!table.is_permutation_derived());
        assert_eq!(table.stored_vectors(), 300);
        for k in 0..300 {
            assert_eq!(cb.position_code(k).unwrap(), table.position_code(k).unwrap());
        }
    }
}
