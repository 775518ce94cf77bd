//! CountMin and CountSketch tables.
//!
//! A [`SketchTable`] is a rows x cols array of signed 64-bit counters with
//! one bucket hash per row (and one sign hash per row in CountSketch
//! mode). CountMin answers queries with the minimum bucket value and never
//! underestimates on insertion-only streams; CountSketch answers with the
//! median of sign-corrected buckets and is unbiased under deletions.
//!
//! Space is accounted in counters: constructors take the total counter
//! budget and split it evenly across rows, so a "space 300" table with 3
//! rows has 100 columns. Counters saturate instead of wrapping on
//! overflow; a saturated table keeps a flag so harnesses can report it.

use crate::error::{Error, Result};
use crate::hash::{HashSeed, KWiseHash, SignHash, DEFAULT_DEGREE};

/// One stream event: add `delta` to the count of `item`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamUpdate {
    pub item: u64,
    pub delta: i64,
}

impl StreamUpdate {
    pub fn new(item: u64, delta: i64) -> Self {
        StreamUpdate { item, delta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SketchMode {
    CountMin,
    CountSketch,
}

#[derive(Debug, Clone)]
pub struct SketchTable {
    mode: SketchMode,
    rows: usize,
    cols: usize,
    counters: Vec<i64>,
    bucket_hashes: Vec<KWiseHash>,
    sign_hashes: Vec<SignHash>,
    total_updates: u64,
    saturated: bool,
}

impl SketchTable {
    /// CountMin table over `total_space` counters split across `rows` rows.
    pub fn count_min(rows: usize, total_space: usize, seed: HashSeed) -> Result<Self> {
        Self::build(SketchMode::CountMin, rows, total_space, seed, true)
    }

    /// CountSketch table. `rows` must be odd so the median is a counter
    /// value rather than an average.
    pub fn count_sketch(rows: usize, total_space: usize, seed: HashSeed) -> Result<Self> {
        Self::build(SketchMode::CountSketch, rows, total_space, seed, false)
    }

    /// CountSketch without the odd-rows check; even-row tables answer with
    /// the lower middle of the sorted row estimates. Only the layered
    /// sketch's strict four-row layout uses this.
    pub(crate) fn count_sketch_any_rows(
        rows: usize,
        total_space: usize,
        seed: HashSeed,
    ) -> Result<Self> {
        Self::build(SketchMode::CountSketch, rows, total_space, seed, true)
    }

    fn build(
        mode: SketchMode,
        rows: usize,
        total_space: usize,
        seed: HashSeed,
        allow_even: bool,
    ) -> Result<Self> {
        if rows == 0 {
            return Err(Error::InvalidParameter {
                param: "rows",
                value: "0".to_string(),
                constraint: "a sketch needs at least one row",
            });
        }
        if mode == SketchMode::CountSketch && !allow_even && rows.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                param: "rows",
                value: rows.to_string(),
                constraint: "CountSketch rows must be odd for a well-defined median",
            });
        }
        let cols = total_space / rows;
        if cols == 0 {
            return Err(Error::InvalidParameter {
                param: "total_space",
                value: total_space.to_string(),
                constraint: "space budget must allow at least one column per row",
            });
        }
        let mut bucket_hashes = Vec::with_capacity(rows);
        let mut sign_hashes = Vec::with_capacity(rows);
        for row in 0..rows {
            bucket_hashes.push(KWiseHash::new(
                seed.child(2 * row as u64),
                DEFAULT_DEGREE,
                cols as u64,
            )?);
            if mode == SketchMode::CountSketch {
                sign_hashes.push(SignHash::new(seed.child(2 * row as u64 + 1), DEFAULT_DEGREE)?);
            }
        }
        Ok(SketchTable {
            mode,
            rows,
            cols,
            counters: vec![0; rows * cols],
            bucket_hashes,
            sign_hashes,
            total_updates: 0,
            saturated: false,
        })
    }

    pub fn update(&mut self, u: StreamUpdate) {
        self.total_updates += 1;
        for row in 0..self.rows {
            let bucket = self.bucket_hashes[row].eval(u.item) as usize;
            let delta = match self.mode {
                SketchMode::CountMin => u.delta,
                SketchMode::CountSketch => self.sign_hashes[row].eval_sign(u.item) * u.delta,
            };
            let cell = &mut self.counters[row * self.cols + bucket];
            match cell.checked_add(delta) {
                Some(v) => *cell = v,
                None => {
                    *cell = if delta > 0 { i64::MAX } else { i64::MIN };
                    self.saturated = true;
                }
            }
        }
    }

    /// Frequency estimate: minimum bucket (CountMin) or median of
    /// sign-corrected buckets (CountSketch).
    pub fn query(&self, item: u64) -> i64 {
        match self.mode {
            SketchMode::CountMin => (0..self.rows)
                .map(|row| self.counters[row * self.cols + self.bucket_of(row, item)])
                .min()
                .unwrap(),
            SketchMode::CountSketch => {
                let mut vals: Vec<i64> = (0..self.rows)
                    .map(|row| {
                        self.sign_of(row, item)
                            * self.counters[row * self.cols + self.bucket_of(row, item)]
                    })
                    .collect();
                vals.sort_unstable();
                vals[(vals.len() - 1) / 2]
            }
        }
    }

    /// Estimate truncated at zero.
    pub fn query_nonneg(&self, item: u64) -> i64 {
        self.query(item).max(0)
    }

    /// Bucket index of `item` in `row`; exposed so reference computations
    /// can rebuild counters from the definition.
    pub fn bucket_of(&self, row: usize, item: u64) -> usize {
        self.bucket_hashes[row].eval(item) as usize
    }

    /// Sign of `item` in `row`; +1 in CountMin mode.
    pub fn sign_of(&self, row: usize, item: u64) -> i64 {
        match self.mode {
            SketchMode::CountMin => 1,
            SketchMode::CountSketch => self.sign_hashes[row].eval_sign(item),
        }
    }

    pub fn mode(&self) -> SketchMode {
        self.mode
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Total counters, the table's space cost.
    pub fn total_counters(&self) -> usize {
        self.rows * self.cols
    }

    pub fn total_updates(&self) -> u64 {
        self.total_updates
    }

    /// True if any counter has saturated at i64::MIN/MAX.
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    /// Row-major view of the counter array.
    pub fn counters(&self) -> &[i64] {
        &self.counters
    }

    pub fn counter(&self, row: usize, col: usize) -> i64 {
        self.counters[row * self.cols + col]
    }
}
