//! Seedable random source used by all samplers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::distr::{Distribution, Uniform};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

#[derive(Debug, Clone)]
pub struct RandomSource {
    inner: ChaCha12Rng,
    seed: u64,
    bit_buf: u64,
    bits_left: u32,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent stream `stream` of the generator keyed by `seed`.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RandomSource { inner, seed, bit_buf: 0, bits_left: 0 }
    }

    /// A fresh source on another stream of the same seed.
    pub fn split(&self, stream: u64) -> Self {
        Self::with_stream(self.seed, stream.wrapping_add(1))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    pub fn uniform_real(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform in [0, bound), unbiased. Panics if `bound == 0`.
    pub fn uniform_int(&mut self, bound: u64) -> u64 {
        assert!(bound >= 1, "uniform_int bound must be >= 1");
        if bound == 1 {
            return 0;
        }
        Uniform::new(0, bound).expect("nonempty range").sample(&mut self.inner)
    }

    /// True with probability `p` (clamped to [0, 1]).
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p >= 1.0 {
            return true;
        }
        self.uniform_real() < p
    }

    pub fn random_bit(&mut self) -> bool {
        if self.bits_left == 0 {
            self.bit_buf = self.inner.next_u64();
            self.bits_left = 64;
        }
        let b = self.bit_buf & 1 == 1;
        self.bit_buf >>= 1;
        self.bits_left -= 1;
        b
    }

    /// Exact Bernoulli for a rational `p` in [0, 1]: random bits are compared
    /// against the binary expansion of `p` until they differ.
    pub fn bernoulli_rational(&mut self, p: &BigRational) -> bool {
        if !p.is_positive() {
            return false;
        }
        if p >= &BigRational::one() {
            return true;
        }
        let mut a: BigInt = p.numer().clone();
        let b: &BigInt = p.denom();
        loop {
            a <<= 1;
            let p_bit = &a >= b;
            if p_bit {
                a -= b;
            }
            let u_bit = self.random_bit();
            if u_bit != p_bit {
                return p_bit;
            }
            if a.is_zero() {
                // remaining expansion is all zeros, so U >= p from here on
                return false;
            }
        }
    }
}
