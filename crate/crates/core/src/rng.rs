//! Seeded randomness for initialization, latent noise and shuffling.
//!
//! The generator is ChaCha8 (`rand_chacha`), seeded from a `u64` through
//! `SeedableRng::seed_from_u64`. Independent streams for the same seed are
//! ChaCha stream ids: fleet member `i` draws from stream `i` of the base
//! seed, so its randomness does not depend on which thread trains it or in
//! which order. Normal variates use the Box-Muller transform; bounded
//! integers use rejection sampling. Every step is platform independent.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::nn::Scalar;

#[derive(Debug, Clone)]
pub struct Prng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Self::derive(seed, 0)
    }

    /// Stream `stream` of `seed`. Distinct stream ids never overlap.
    pub fn derive(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Prng {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`; safe to take the log of.
    #[inline]
    fn next_f64_open0(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`, unbiased. `n` must be non-zero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        // Reject the partial block at the top of the u64 range.
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }

    /// Uniform on the open interval `(-bound, bound)` after rounding to `T`.
    pub fn uniform_symmetric<T: Scalar>(&mut self, bound: f64) -> T {
        let b = T::lit(bound);
        loop {
            let x = T::lit(bound * (2.0 * self.next_f64() - 1.0));
            if x.abs() < b {
                return x;
            }
        }
    }

    /// `n` i.i.d. draws from N(0, 1).
    pub fn standard_normal<T: Scalar>(&mut self, n: usize) -> Vec<T> {
        let mut out = vec![T::zero(); n];
        self.fill_standard_normal(&mut out);
        out
    }

    pub fn fill_standard_normal<T: Scalar>(&mut self, out: &mut [T]) {
        for pair in out.chunks_mut(2) {
            let r = (-2.0 * self.next_f64_open0().ln()).sqrt();
            let theta = std::f64::consts::TAU * self.next_f64();
            pair[0] = T::lit(r * theta.cos());
            if let Some(second) = pair.get_mut(1) {
                *second = T::lit(r * theta.sin());
            }
        }
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_of_zero_is_empty() {
        assert!(Prng::new(3).standard_normal::<f64>(0).is_empty());
    }

    #[test]
    fn same_seed_same_stream() {
        let a = Prng::new(42).standard_normal::<f32>(101);
        let b = Prng::new(42).standard_normal::<f32>(101);
        assert_eq!(a, b);
        let mut x = Prng::derive(9, 4);
        let mut y = Prng::derive(9, 4);
        assert!((0..1000).all(|_| x.next_u64() == y.next_u64()));
    }

    #[test]
    fn normal_moments() {
        let draws = Prng::new(2024).standard_normal::<f64>(1_000_000);
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!(var > 0.99 && var < 1.01, "variance {var}");
    }

    #[test]
    fn shuffle_degenerate_inputs() {
        let mut rng = Prng::new(1);
        let mut empty: Vec<u32> = vec![];
        rng.shuffle(&mut empty);
        assert!(empty.is_empty());
        let mut one = vec![7];
        rng.shuffle(&mut one);
        assert_eq!(one, vec![7]);
    }

    #[test]
    fn fleet_streams_are_pairwise_distinct() {
        let streams: Vec<Vec<u64>> = (0..8)
            .map(|i| {
                let mut r = Prng::derive(17, i);
                (0..10_000).map(|_| r.next_u64()).collect()
            })
            .collect();
        for i in 0..streams.len() {
            for j in i + 1..streams.len() {
                assert_ne!(streams[i], streams[j]);
                // not merely shifted copies either
                assert!(!streams[j].contains(&streams[i][0]));
            }
        }
    }

    #[test]
    fn uniform_symmetric_stays_open() {
        let mut r = Prng::new(5);
        for _ in 0..100_000 {
            let x: f32 = r.uniform_symmetric(0.125);
            assert!(x > -0.125 && x < 0.125);
        }
    }

    #[test]
    fn below_covers_range() {
        let mut r = Prng::new(8);
        let mut seen = [false; 5];
        for _ in 0..200 {
            seen[r.below(5) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    proptest::proptest! {
        #[test]
        fn shuffle_is_a_permutation(mut v in proptest::collection::vec(0u16..50, 0..200), seed: u64) {
            let mut sorted = v.clone();
            sorted.sort_unstable();
            Prng::new(seed).shuffle(&mut v);
            v.sort_unstable();
            proptest::prop_assert_eq!(v, sorted);
        }
    }
}
