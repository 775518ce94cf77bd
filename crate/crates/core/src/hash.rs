//! Seeded k-wise independent hashing.
//!
//! Every sketch in this crate draws its randomness from polynomial hash
//! functions over the Mersenne prime field GF(2^61 - 1). A degree-k
//! polynomial with coefficients chosen uniformly from the field gives a
//! k-wise independent family, which is all the estimators here need
//! (4-wise by default). Field values are mapped to buckets by a
//! multiply-shift instead of a mod, so bucket reduction is division-free
//! and bias-free; the exact formula `(value * range) >> 61` is part of
//! the reproducibility contract, together with the seed derivation and
//! coefficient generation below. Same seed, same degree, same range:
//! bit-identical outputs on every platform.

use crate::error::{Error, Result};

/// 2^61 - 1, the field modulus.
pub const FIELD_PRIME: u64 = (1 << 61) - 1;

/// Default independence degree; the tail estimator requires 4-wise and
/// nothing here needs more.
pub const DEFAULT_DEGREE: usize = 4;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finalizer; also the fixed mixer behind seed derivation.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Minimal splitmix64 stream, used for coefficient generation and the
/// crate's internal coin flips (noisy oracles, shuffles, samplers).
#[derive(Debug, Clone)]
pub(crate) struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub(crate) fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub(crate) fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub(crate) fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, bound) without modulo bias.
    pub(crate) fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let zone = (u64::MAX / bound) * bound;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }

    /// Uniform field element in [0, FIELD_PRIME).
    fn next_field_element(&mut self) -> u64 {
        loop {
            let v = self.next_u64() >> 3; // 61 bits
            if v < FIELD_PRIME {
                return v;
            }
        }
    }
}

#[inline]
fn add_m61(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= FIELD_PRIME {
        s - FIELD_PRIME
    } else {
        s
    }
}

#[inline]
fn mul_m61(a: u64, b: u64) -> u64 {
    let p = a as u128 * b as u128;
    let folded = (p & FIELD_PRIME as u128) as u64 + (p >> 61) as u64;
    let s = (folded & FIELD_PRIME) + (folded >> 61);
    if s >= FIELD_PRIME {
        s - FIELD_PRIME
    } else {
        s
    }
}

/// One user-facing seed per sketch; everything else is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashSeed(pub u64);

impl HashSeed {
    /// Derive the seed for a numbered sub-component (a row, a table, a
    /// copy). Distinct indices give unrelated-looking streams.
    pub fn child(self, index: u64) -> HashSeed {
        HashSeed(mix64(self.0 ^ GOLDEN_GAMMA.wrapping_mul(index)))
    }
}

impl From<u64> for HashSeed {
    fn from(seed: u64) -> Self {
        HashSeed(seed)
    }
}

/// A degree-(k-1) polynomial over GF(2^61 - 1) reduced into `[0, range)`.
///
/// `coefficients[j]` multiplies `x^j`. Items are mapped into the field by
/// reduction mod the prime before evaluation.
#[derive(Debug, Clone)]
pub struct KWiseHash {
    coefficients: Vec<u64>,
    range: u64,
}

impl KWiseHash {
    pub fn new(seed: HashSeed, degree: usize, range: u64) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidParameter {
                param: "degree",
                value: degree.to_string(),
                constraint: "independence degree must be at least 2",
            });
        }
        if range == 0 {
            return Err(Error::InvalidParameter {
                param: "range",
                value: "0".to_string(),
                constraint: "hash range must be at least 1",
            });
        }
        let mut rng = SplitMix64::new(seed.0);
        let coefficients = (0..degree).map(|_| rng.next_field_element()).collect();
        Ok(KWiseHash {
            coefficients,
            range,
        })
    }

    /// Build from explicit coefficients (`coefficients[j]` times `x^j`).
    /// Used by tests that pin the reduction formula.
    pub fn from_coefficients(coefficients: Vec<u64>, range: u64) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::InvalidParameter {
                param: "coefficients",
                value: coefficients.len().to_string(),
                constraint: "at least 2 coefficients required",
            });
        }
        if range == 0 {
            return Err(Error::InvalidParameter {
                param: "range",
                value: "0".to_string(),
                constraint: "hash range must be at least 1",
            });
        }
        Ok(KWiseHash {
            coefficients: coefficients
                .into_iter()
                .map(|c| c % FIELD_PRIME)
                .collect(),
            range,
        })
    }

    /// Bucket index in `[0, range)`.
    #[inline]
    pub fn eval(&self, item: u64) -> u64 {
        let x = item % FIELD_PRIME;
        let mut acc = 0u64;
        for &c in self.coefficients.iter().rev() {
            acc = add_m61(mul_m61(acc, x), c);
        }
        ((acc as u128 * self.range as u128) >> 61) as u64
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }
}

/// Random sign function: a 2-bucket [`KWiseHash`] with 0 mapped to -1 and
/// 1 mapped to +1.
#[derive(Debug, Clone)]
pub struct SignHash {
    inner: KWiseHash,
}

impl SignHash {
    pub fn new(seed: HashSeed, degree: usize) -> Result<Self> {
        Ok(SignHash {
            inner: KWiseHash::new(seed, degree, 2)?,
        })
    }

    #[inline]
    pub fn eval_sign(&self, item: u64) -> i64 {
        if self.inner.eval(item) == 0 {
            -1
        } else {
            1
        }
    }
}
