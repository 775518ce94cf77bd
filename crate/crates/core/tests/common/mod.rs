//! Helpers shared by the integration test binaries.
#![allow(dead_code)]

use std::collections::BTreeMap;

use freqsketch::{SketchMode, SketchTable, StreamUpdate};

/// Standalone splitmix64 so test streams do not depend on the library's
/// own generator.
pub struct TestRng(pub u64);

impl TestRng {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

/// Random stream over items 1..=n_max. Insertion-only draws deltas from
/// 1..=8, turnstile from -8..=8 excluding 0.
pub fn random_stream(rng: &mut TestRng, n_max: u64, len: usize, insertion_only: bool) -> Vec<StreamUpdate> {
    let mut updates = Vec::with_capacity(len);
    for _ in 0..len {
        let item = 1 + rng.below(n_max);
        let delta = if insertion_only {
            1 + rng.below(8) as i64
        } else {
            let d = rng.below(16) as i64 - 8;
            if d >= 0 {
                d + 1
            } else {
                d
            }
        };
        updates.push(StreamUpdate::new(item, delta));
    }
    updates
}

pub fn frequencies(updates: &[StreamUpdate]) -> BTreeMap<u64, i64> {
    let mut freq = BTreeMap::new();
    for u in updates {
        *freq.entry(u.item).or_insert(0i64) += u.delta;
    }
    freq
}

/// Recomputes every counter of `table` from the frequency vector alone,
/// straight from the bucket-sum definition.
pub fn reference_counters(table: &SketchTable, freq: &BTreeMap<u64, i64>) -> Vec<i64> {
    let mut counters = vec![0i64; table.rows() * table.cols()];
    for (&item, &f) in freq {
        for row in 0..table.rows() {
            let b = table.bucket_of(row, item);
            let signed = match table.mode() {
                SketchMode::CountMin => f,
                SketchMode::CountSketch => table.sign_of(row, item) * f,
            };
            counters[row * table.cols() + b] += signed;
        }
    }
    counters
}

/// Query recomputed from the reference counters.
pub fn reference_query(table: &SketchTable, freq: &BTreeMap<u64, i64>, item: u64) -> i64 {
    let counters = reference_counters(table, freq);
    let mut vals: Vec<i64> = (0..table.rows())
        .map(|row| {
            let c = counters[row * table.cols() + table.bucket_of(row, item)];
            match table.mode() {
                SketchMode::CountMin => c,
                SketchMode::CountSketch => table.sign_of(row, item) * c,
            }
        })
        .collect();
    match table.mode() {
        SketchMode::CountMin => vals.iter().copied().min().unwrap_or(0),
        SketchMode::CountSketch => {
            vals.sort_unstable();
            vals[(vals.len() - 1) / 2]
        }
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
