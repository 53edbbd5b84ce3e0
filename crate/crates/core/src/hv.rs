//! Bit-packed binary hypervectors and the binary spatter code operators.
//!
//! Bit `i` of a vector lives in word `i / 64` at bit position `i % 64`
//! (little-endian bit order). Bits past `n` in the final word are always
//! zero, which every constructor and operator maintains.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::SeededRng;

pub const WORD_BITS: usize = 64;

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// Mask of the valid bits in the last word of an `n`-bit vector.
pub(crate) fn tail_mask(n: usize) -> u64 {
    match n % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryHypervector {
    dim: usize,
    words: Vec<u64>,
}

impl BinaryHypervector {
    /// The all-zero vector; the identity of [`bind`].
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            words: vec![0; words_for(dim)],
        })
    }

    pub fn ones(dim: usize) -> Result<Self> {
        let mut hv = Self::zeros(dim)?;
        hv.words.fill(u64::MAX);
        hv.clear_padding();
        Ok(hv)
    }

    /// A vector with each bit drawn independently with probability 1/2.
    ///
    /// Consumes `ceil(dim / 64)` values of `rng`, one per word, in word order.
    pub fn random(rng: &mut SeededRng, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let words = (0..words_for(dim)).map(|_| rng.next_u64()).collect();
        let mut hv = Self { dim, words };
        hv.clear_padding();
        Ok(hv)
    }

    /// Builds a vector from packed words; padding bits must be zero.
    pub fn from_words(dim: usize, words: Vec<u64>) -> Result<Self> {
        check_dim(dim)?;
        if words.len() != words_for(dim) {
            return Err(Error::InvalidArgument(format!(
                "{} words cannot hold a {dim}-bit vector",
                words.len()
            )));
        }
        if words[words.len() - 1] & !tail_mask(dim) != 0 {
            return Err(Error::InvalidArgument("padding bits must be zero".into()));
        }
        Ok(Self { dim, words })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut hv = Self::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            hv.set(i, b);
        }
        Ok(hv)
    }

    /// Packed little-endian bytes, `ceil(dim / 8)` of them.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        out.truncate(self.dim.div_ceil(8));
        out
    }

    pub fn from_bytes(dim: usize, bytes: &[u8]) -> Result<Self> {
        check_dim(dim)?;
        if bytes.len() != dim.div_ceil(8) {
            return Err(Error::InvalidArgument(format!(
                "{} bytes cannot hold a {dim}-bit vector",
                bytes.len()
            )));
        }
        let mut words = vec![0u64; words_for(dim)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= u64::from(b) << (8 * (i % 8));
        }
        Self::from_words(dim, words)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.dim, "bit {i} out of range for dimension {}", self.dim);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.dim, "bit {i} out of range for dimension {}", self.dim);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.dim, "bit {i} out of range for dimension {}", self.dim);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn complement(&self) -> Self {
        let mut out = Self {
            dim: self.dim,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_padding();
        out
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.dim).map(|i| self.get(i))
    }

    /// In-place XOR with `other`; both must share a dimension.
    pub fn xor_assign(&mut self, other: &Self) -> Result<()> {
        check_same(self, other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// True when the padding bits past `dim` are all zero.
    pub fn padding_is_clear(&self) -> bool {
        self.words.last().is_some_and(|w| w & !tail_mask(self.dim) == 0)
    }

    pub(crate) fn clear_padding(&mut self) {
        let mask = tail_mask(self.dim);
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }
}

impl fmt::Debug for BinaryHypervector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: String = self.iter_bits().take(32).map(|b| if b { '1' } else { '0' }).collect();
        write!(
            f,
            "BinaryHypervector {{ dim: {}, ones: {}, head: {head}{} }}",
            self.dim,
            self.count_ones(),
            if self.dim > 32 { "..." } else { "" }
        )
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidDimension("dimension must be positive".into()));
    }
    Ok(())
}

pub(crate) fn check_same(a: &BinaryHypervector, b: &BinaryHypervector) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            actual: b.dim,
        });
    }
    Ok(())
}

/// `n`-bit vector with independent fair bits from `rng`.
pub fn random_hv(rng: &mut SeededRng, n: usize) -> Result<BinaryHypervector> {
    BinaryHypervector::random(rng, n)
}

/// Binding: element-wise XOR.
pub fn bind(a: &BinaryHypervector, b: &BinaryHypervector) -> Result<BinaryHypervector> {
    let mut out = a.clone();
    out.xor_assign(b)?;
    Ok(out)
}

/// Circular shift: `result[(i + shift) mod n] = a[i]`.
///
/// Any shift is accepted and reduced modulo `n`, negative shifts included.
pub fn permute(a: &BinaryHypervector, shift: i64) -> BinaryHypervector {
    let n = a.dim;
    let s = shift.rem_euclid(n as i64) as usize;
    let mut out = BinaryHypervector {
        dim: n,
        words: vec![0; a.words.len()],
    };
    permute_into(a, s, &mut out.words);
    out
}

/// Writes `permute(a, s)` into `out` for `s < n`.
pub(crate) fn permute_into(a: &BinaryHypervector, s: usize, out: &mut [u64]) {
    let n = a.dim;
    debug_assert!(s < n);
    debug_assert_eq!(out.len(), a.words.len());
    if s == 0 {
        out.copy_from_slice(&a.words);
        return;
    }
    // Low part: bits [0, n-s) move up by s. High part: bits [n-s, n) wrap
    // down by n-s.
    out.fill(0);
    or_shifted_up(&a.words, s, out);
    or_shifted_down(&a.words, n - s, out);
    if let Some(last) = out.last_mut() {
        *last &= tail_mask(n);
    }
}

/// `out |= src << s` over the packed words, dropping bits past the end.
fn or_shifted_up(src: &[u64], s: usize, out: &mut [u64]) {
    let ws = s / WORD_BITS;
    let bs = s % WORD_BITS;
    let len = out.len();
    for i in ws..len {
        let lo = src[i - ws];
        let mut v = lo << bs;
        if bs != 0 && i > ws {
            v |= src[i - ws - 1] >> (WORD_BITS - bs);
        }
        out[i] |= v;
    }
}

/// `out |= src >> s` over the packed words.
fn or_shifted_down(src: &[u64], s: usize, out: &mut [u64]) {
    let ws = s / WORD_BITS;
    let bs = s % WORD_BITS;
    let len = src.len();
    for i in 0..len.saturating_sub(ws) {
        let mut v = src[i + ws] >> bs;
        if bs != 0 && i + ws + 1 < len {
            v |= src[i + ws + 1] << (WORD_BITS - bs);
        }
        out[i] |= v;
    }
}

/// Number of differing bits.
pub fn hamming_bits(a: &BinaryHypervector, b: &BinaryHypervector) -> Result<usize> {
    check_same(a, b)?;
    Ok(a.words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum())
}

/// Normalized Hamming distance, `popcount(a ^ b) / n`.
pub fn hamming(a: &BinaryHypervector, b: &BinaryHypervector) -> Result<f64> {
    Ok(hamming_bits(a, b)? as f64 / a.dim as f64)
}
