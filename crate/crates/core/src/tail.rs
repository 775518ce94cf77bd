//! Tail-norm estimation.
//!
//! [`BasicTailSketch`] samples roughly a 1/B' fraction of the domain (the
//! items landing in one designated hash bucket) and tracks c = 32 signed
//! sums over that sample; the mean of their squares estimates the squared
//! 2-norm of the sampled frequencies. [`TailEstimator`] runs B independent
//! copies and takes an upper order statistic, which concentrates around
//! the squared tail norm (the norm with the heaviest items removed) scaled
//! by 1/B'. The square root of that value serves as a data-independent
//! zeroing threshold for layered sketches on adversarial streams.

use crate::error::{Error, Result};
use crate::hash::{HashSeed, KWiseHash, SignHash, DEFAULT_DEGREE};
use crate::sketch::StreamUpdate;

/// Sign functions per sketch copy.
pub const DEFAULT_SIGN_COUNT: usize = 32;

#[derive(Debug, Clone)]
pub struct BasicTailSketch {
    bucket_hash: KWiseHash,
    signs: Vec<SignHash>,
    acc: Vec<i64>,
}

impl BasicTailSketch {
    pub fn new(bucket_range: usize, seed: HashSeed) -> Result<Self> {
        Self::with_sign_count(bucket_range, DEFAULT_SIGN_COUNT, seed)
    }

    pub fn with_sign_count(
        bucket_range: usize,
        sign_count: usize,
        seed: HashSeed,
    ) -> Result<Self> {
        if bucket_range == 0 {
            return Err(Error::InvalidParameter {
                param: "bucket_range",
                value: "0".to_string(),
                constraint: "sampling bucket range must be positive",
            });
        }
        if sign_count == 0 {
            return Err(Error::InvalidParameter {
                param: "sign_count",
                value: "0".to_string(),
                constraint: "at least one sign function is required",
            });
        }
        let bucket_hash = KWiseHash::new(seed.child(0), DEFAULT_DEGREE, bucket_range as u64)?;
        let mut signs = Vec::with_capacity(sign_count);
        for j in 0..sign_count {
            signs.push(SignHash::new(seed.child(1 + j as u64), DEFAULT_DEGREE)?);
        }
        Ok(BasicTailSketch {
            bucket_hash,
            signs,
            acc: vec![0; sign_count],
        })
    }

    /// True when the item lands in the designated bucket (index 0) and so
    /// contributes to the accumulators.
    pub fn contributes(&self, item: u64) -> bool {
        self.bucket_hash.eval(item) == 0
    }

    pub fn update(&mut self, u: StreamUpdate) {
        if !self.contributes(u.item) {
            return;
        }
        for (j, sign) in self.signs.iter().enumerate() {
            let z = &mut self.acc[j];
            *z = z.saturating_add(sign.eval_sign(u.item) * u.delta);
        }
    }

    /// Mean of the squared accumulators. Integer arithmetic throughout;
    /// the single division happens here.
    pub fn finalize(&self) -> f64 {
        let sum: i128 = self.acc.iter().map(|&z| (z as i128) * (z as i128)).sum();
        sum as f64 / self.acc.len() as f64
    }

    pub fn sign_of(&self, j: usize, item: u64) -> i64 {
        self.signs[j].eval_sign(item)
    }

    pub fn sign_count(&self) -> usize {
        self.signs.len()
    }

    pub fn accumulators(&self) -> &[i64] {
        &self.acc
    }
}

/// Largest-first order statistic: rank 1 is the maximum.
fn rank_statistic(mut values: Vec<f64>, rank: usize) -> f64 {
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    values[rank - 1]
}

/// B independent [`BasicTailSketch`] copies reduced to one value: the
/// floor(B/3)-th largest of the per-copy estimates.
#[derive(Debug, Clone)]
pub struct TailEstimator {
    copies: Vec<BasicTailSketch>,
}

impl TailEstimator {
    pub fn new(copies: usize, bucket_range: usize, seed: HashSeed) -> Result<Self> {
        Self::with_sign_count(copies, bucket_range, DEFAULT_SIGN_COUNT, seed)
    }

    pub fn with_sign_count(
        copies: usize,
        bucket_range: usize,
        sign_count: usize,
        seed: HashSeed,
    ) -> Result<Self> {
        if copies < 3 {
            return Err(Error::InvalidParameter {
                param: "copies",
                value: copies.to_string(),
                constraint: "the rank-floor(B/3) statistic needs at least 3 copies",
            });
        }
        let mut built = Vec::with_capacity(copies);
        for i in 0..copies {
            built.push(BasicTailSketch::with_sign_count(
                bucket_range,
                sign_count,
                seed.child(i as u64),
            )?);
        }
        Ok(TailEstimator { copies: built })
    }

    pub fn update(&mut self, u: StreamUpdate) {
        for copy in &mut self.copies {
            copy.update(u);
        }
    }

    /// The floor(B/3)-th largest per-copy value; nonnegative because each
    /// per-copy value is a mean of squares.
    pub fn finalize(&self) -> f64 {
        let values: Vec<f64> = self.copies.iter().map(|c| c.finalize()).collect();
        rank_statistic(values, self.copies.len() / 3)
    }

    pub fn copies(&self) -> usize {
        self.copies.len()
    }

    /// Accumulator cells across all copies, the estimator's space cost.
    pub fn total_accumulators(&self) -> usize {
        self.copies.iter().map(|c| c.sign_count()).sum()
    }
}

/// Squared 2-norm of the frequency vector with its `head` largest
/// coordinates removed (ties broken toward smaller index staying in the
/// head). Exact; used as the reference the estimator is judged against.
pub fn exact_tail_norm(freqs: &[i64], head: usize) -> f64 {
    let mut order: Vec<usize> = (0..freqs.len()).collect();
    order.sort_by(|&a, &b| freqs[b].cmp(&freqs[a]).then(a.cmp(&b)));
    let mut sum: i128 = 0;
    for &idx in order.iter().skip(head) {
        sum += (freqs[idx] as i128) * (freqs[idx] as i128);
    }
    sum as f64
}
