//! Pre-threshold sums for bundling.
//!
//! Two representations compute the same thing. [`AccumulatorVector`] keeps
//! one integer per dimension and is the plain reference form.
//! [`MajorityCounter`] keeps the per-dimension counts bit-sliced: plane `p`
//! holds bit `p` of every count, so adding a hypervector is a ripple-carry
//! over whole 64-bit words. Encoders use the counter.

use crate::error::{Error, Result};
use crate::hv::{check_same, tail_mask, words_for, BinaryHypervector};

/// Per-dimension weighted count of one-bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccumulatorVector {
    values: Vec<i64>,
    total_weight: u64,
}

impl AccumulatorVector {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("dimension must be positive".into()));
        }
        Ok(Self {
            values: vec![0; dim],
            total_weight: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn add(&mut self, hv: &BinaryHypervector, weight: u32) -> Result<()> {
        if hv.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: hv.dim(),
            });
        }
        let w = i64::from(weight);
        for (i, v) in self.values.iter_mut().enumerate() {
            if hv.get(i) {
                *v += w;
            }
        }
        self.total_weight += u64::from(weight);
        Ok(())
    }

    /// Strict majority: bit `i` is set iff `values[i] > total_weight / 2`.
    pub fn majority(&self) -> BinaryHypervector {
        let mut out = BinaryHypervector::zeros(self.dim()).expect("dim checked at construction");
        let total = self.total_weight as i64;
        for (i, &v) in self.values.iter().enumerate() {
            if 2 * v > total {
                out.set(i, true);
            }
        }
        out
    }
}

/// Bit-sliced per-dimension counters.
#[derive(Debug, Clone)]
pub struct MajorityCounter {
    dim: usize,
    planes: Vec<Vec<u64>>,
    carry: Vec<u64>,
    total_weight: u64,
}

impl MajorityCounter {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("dimension must be positive".into()));
        }
        Ok(Self {
            dim,
            planes: Vec::new(),
            carry: vec![0; words_for(dim)],
            total_weight: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn clear(&mut self) {
        for plane in &mut self.planes {
            plane.fill(0);
        }
        self.total_weight = 0;
    }

    /// Adds `weight` to the count of every dimension where `hv` is one.
    pub fn add(&mut self, hv: &BinaryHypervector, weight: u32) -> Result<()> {
        if hv.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: hv.dim(),
            });
        }
        self.add_words(hv.words(), weight);
        Ok(())
    }

    pub(crate) fn add_words(&mut self, words: &[u64], weight: u32) {
        debug_assert_eq!(words.len(), self.carry.len());
        let mut w = weight;
        let mut plane = 0;
        while w != 0 {
            if w & 1 == 1 {
                self.ripple(words, plane);
            }
            w >>= 1;
            plane += 1;
        }
        self.total_weight += u64::from(weight);
    }

    fn ripple(&mut self, words: &[u64], start: usize) {
        self.carry.copy_from_slice(words);
        let mut p = start;
        loop {
            while p >= self.planes.len() {
                self.planes.push(vec![0; self.carry.len()]);
            }
            let plane = &mut self.planes[p];
            let mut any = 0u64;
            for (s, c) in plane.iter_mut().zip(self.carry.iter_mut()) {
                let sum = *s ^ *c;
                *c &= *s;
                *s = sum;
                any |= *c;
            }
            if any == 0 {
                break;
            }
            p += 1;
        }
    }

    /// Count at dimension `i`.
    pub fn count(&self, i: usize) -> u64 {
        assert!(i < self.dim);
        let (w, b) = (i / 64, i % 64);
        self.planes
            .iter()
            .enumerate()
            .map(|(p, plane)| (plane[w] >> b & 1) << p)
            .sum()
    }

    /// Bit `i` is set iff `count(i) > threshold`.
    pub fn greater_than(&self, threshold: u64) -> BinaryHypervector {
        let nwords = self.carry.len();
        let mut words = vec![0u64; nwords];
        let planes = self.planes.len();
        if planes < 64 && threshold >> planes != 0 {
            // every count is below 2^planes <= threshold
            return BinaryHypervector::from_words(self.dim, words).expect("zeroed words");
        }
        for (w, out) in words.iter_mut().enumerate() {
            let mut gt = 0u64;
            let mut eq = u64::MAX;
            for p in (0..planes).rev() {
                let bits = self.planes[p][w];
                if threshold >> p & 1 == 1 {
                    eq &= bits;
                } else {
                    gt |= eq & bits;
                    eq &= !bits;
                }
            }
            *out = gt;
        }
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(self.dim);
        }
        BinaryHypervector::from_words(self.dim, words).expect("padding masked")
    }

    /// Strict weighted majority: `count(i) > total_weight / 2`.
    pub fn majority(&self) -> BinaryHypervector {
        // For integer counts, c > t/2 is the same as c > floor(t/2).
        self.greater_than(self.total_weight / 2)
    }
}

/// Weighted element-wise majority vote.
///
/// Bit `i` of the result is one iff the total weight of inputs with a one at
/// `i` strictly exceeds half of the total weight; ties resolve to zero.
pub fn bundle(items: &[(&BinaryHypervector, u32)]) -> Result<BinaryHypervector> {
    let Some((first, _)) = items.first() else {
        return Err(Error::InvalidArgument("cannot bundle an empty list".into()));
    };
    let mut counter = MajorityCounter::new(first.dim())?;
    for (hv, weight) in items {
        check_same(first, hv)?;
        if *weight == 0 {
            return Err(Error::InvalidArgument("bundle weights must be positive".into()));
        }
        counter.add(hv, *weight)?;
    }
    Ok(counter.majority())
}

/// Unweighted majority vote.
pub fn bundle_unweighted(items: &[BinaryHypervector]) -> Result<BinaryHypervector> {
    let refs: Vec<_> = items.iter().map(|hv| (hv, 1)).collect();
    bundle(&refs)
}
