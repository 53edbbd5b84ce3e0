//! Deterministic, platform-independent randomness.
//!
//! Every random quantity in a model (position codes, the value flip order,
//! the sparse basis, training shuffles) is derived from one 64-bit model
//! seed, so a model file only needs the seed to regenerate its codebooks.
//!
//! The generator is xoshiro256\*\* (Blackman & Vigna). Its 256-bit state
//! `s[0..4]` is filled from the seed with SplitMix64:
//!
//! ```text
//! z = (x += 0x9e3779b97f4a7c15)
//! z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//! z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//! return z ^ (z >> 31)
//! ```
//!
//! and each output is
//!
//! ```text
//! result = rotl(s[1] * 5, 7) * 9
//! t = s[1] << 17
//! s[2] ^= s[0]; s[3] ^= s[1]; s[1] ^= s[2]; s[0] ^= s[3]
//! s[2] ^= t;    s[3] = rotl(s[3], 45)
//! ```
//!
//! Independent purposes draw from non-overlapping sub-streams: sub-stream
//! `k` of a seed is the seeded generator advanced by `k` applications of the
//! xoshiro256 jump function (2^128 steps each). See [`Stream`].

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

/// Named sub-streams of a model seed, in their fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Dense position basis vectors (row/column/coalesced codes).
    Positions = 0,
    /// The level codebook's bit-flip order.
    FlipOrder = 1,
    /// Sparse basis indices followed by count-sketch signs.
    SparseBasis = 2,
    /// Per-epoch training order.
    Shuffle = 3,
    /// Train/test splits of datasets without a canonical split.
    Split = 4,
}

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: Xoshiro256StarStar,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    /// Sub-stream `stream` of `seed`.
    pub fn stream(seed: u64, stream: Stream) -> Self {
        let mut rng = Self::new(seed);
        for _ in 0..stream as u32 {
            rng.inner.jump();
        }
        rng
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child generator for a parallel task. The child is seeded with the
    /// next output of `self`, so splitting consumes one value of the stream.
    pub fn split(&mut self) -> Self {
        Self::new(self.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..bound` (Lemire's multiply-and-reject method).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let mut m = u128::from(self.next_u64()) * u128::from(bound);
        if (m as u64) < bound {
            let threshold = bound.wrapping_neg() % bound;
            while (m as u64) < threshold {
                m = u128::from(self.next_u64()) * u128::from(bound);
            }
        }
        (m >> 64) as u64
    }

    /// Fisher-Yates shuffle, walking from the last element down.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// A uniformly random permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<u32> {
        let mut order: Vec<u32> = (0..n as u32).collect();
        self.shuffle(&mut order);
        order
    }

    /// `count` distinct values from `0..n`, in draw order (the first
    /// `count` steps of a forward Fisher-Yates pass).
    pub fn distinct(&mut self, n: usize, count: usize) -> Vec<u32> {
        assert!(count <= n, "cannot draw {count} distinct values from {n}");
        let mut pool: Vec<u32> = (0..n as u32).collect();
        for i in 0..count {
            let j = i + self.below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(count);
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededRng::new(7);
        let mut b = SeededRng::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn known_first_outputs() {
        // Pinned so that any change to seeding or the generator is caught;
        // model files depend on this stream.
        let mut rng = SeededRng::new(1);
        let first: Vec<u64> = (0..3).map(|_| rng.next_u64()).collect();
        let mut again = SeededRng::new(1);
        assert_eq!(first, (0..3).map(|_| again.next_u64()).collect::<Vec<_>>());
        assert_eq!(first, KNOWN_SEED1);
    }

    // Computed with an independent SplitMix64 + xoshiro256** implementation.
    const KNOWN_SEED1: [u64; 3] = [12966619160104079557, 9600361134598540522, 10590380919521690900];

    #[test]
    fn jump_stream_known_output() {
        let mut rng = SeededRng::stream(3, Stream::FlipOrder);
        assert_eq!(rng.next_u64(), 12719809526506038857);
    }

    #[test]
    fn streams_differ() {
        let mut a = SeededRng::stream(3, Stream::Positions);
        let mut b = SeededRng::stream(3, Stream::FlipOrder);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn below_stays_in_range_and_covers() {
        let mut rng = SeededRng::new(11);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            let v = rng.below(7) as usize;
            seen[v] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn permutation_is_a_permutation() {
        let mut rng = SeededRng::new(5);
        let mut p = rng.permutation(1000);
        p.sort_unstable();
        assert!(p.iter().enumerate().all(|(i, &v)| i as u32 == v));
    }

    #[test]
    fn distinct_values_are_distinct() {
        let mut rng = SeededRng::new(5);
        let mut d = rng.distinct(50, 50);
        d.sort_unstable();
        d.dedup();
        assert_eq!(d.len(), 50);
    }
}
