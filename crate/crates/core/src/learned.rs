//! Heavy-hitter oracles and the learned sketch wrapper.
//!
//! A [`HeavyHitterOracle`] predicts whether an item will be frequent. The
//! [`LearnedSketch`] routes predicted-heavy items to an exact-count table
//! and everything else to a backing [`SketchTable`], so oracle hits cost
//! zero error while misses degrade gracefully to plain sketch accuracy.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hash::{HashSeed, SplitMix64};
use crate::sketch::{SketchMode, SketchTable, StreamUpdate};

#[derive(Debug, Clone)]
enum OracleKind {
    /// Answers membership in a fixed heavy set.
    Perfect,
    /// Same as Perfect but the set came from a prediction file.
    Lookup,
    /// Perfect answer flipped independently with `flip_prob` per call.
    Noisy { flip_prob: f64, rng: SplitMix64 },
}

/// Predicts whether an item is heavy. Construction fixes the behavior;
/// `predict` is the only query path and counts every call.
#[derive(Debug, Clone)]
pub struct HeavyHitterOracle {
    kind: OracleKind,
    heavy_set: HashSet<u64>,
    queries_made: u64,
}

impl HeavyHitterOracle {
    /// Oracle that answers exactly membership in `heavy_set`. Callers
    /// decide what "heavy" means; pair with [`crate::stream::top_items`]
    /// for the usual top-H-by-frequency set.
    pub fn perfect(heavy_set: HashSet<u64>) -> Self {
        HeavyHitterOracle {
            kind: OracleKind::Perfect,
            heavy_set,
            queries_made: 0,
        }
    }

    /// Perfect-style oracle whose answers are flipped independently with
    /// probability `flip_prob`, using a stream of coins seeded by `seed`.
    pub fn noisy(heavy_set: HashSet<u64>, flip_prob: f64, seed: HashSeed) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip_prob) || flip_prob.is_nan() {
            return Err(Error::InvalidParameter {
                param: "flip_prob",
                value: flip_prob.to_string(),
                constraint: "flip probability must lie in [0, 1]",
            });
        }
        Ok(HeavyHitterOracle {
            kind: OracleKind::Noisy {
                flip_prob,
                rng: SplitMix64::new(seed.0),
            },
            heavy_set,
            queries_made: 0,
        })
    }

    /// Loads a heavy set from a prediction file: UTF-8 text, one decimal
    /// item id per line, duplicate ids ignored.
    pub fn from_lookup_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut heavy_set = HashSet::new();
        for (index, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let item: u64 = trimmed.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: index + 1,
                message: format!("expected a decimal item id, got {trimmed:?}"),
            })?;
            heavy_set.insert(item);
        }
        Ok(HeavyHitterOracle {
            kind: OracleKind::Lookup,
            heavy_set,
            queries_made: 0,
        })
    }

    /// Classifies `item`. Every call counts toward `queries_made`, noisy
    /// coin flips are consumed in call order, so prediction sequences are
    /// reproducible only if the call sequence is.
    pub fn predict(&mut self, item: u64) -> bool {
        self.queries_made += 1;
        let truth = self.heavy_set.contains(&item);
        match &mut self.kind {
            OracleKind::Perfect | OracleKind::Lookup => truth,
            OracleKind::Noisy { flip_prob, rng } => {
                let flip = rng.next_f64() < *flip_prob;
                truth != flip
            }
        }
    }

    pub fn queries_made(&self) -> u64 {
        self.queries_made
    }

    pub fn heavy_set_len(&self) -> usize {
        self.heavy_set.len()
    }
}

/// Exact counts for up to `capacity` items, first come first kept.
#[derive(Debug, Clone)]
pub struct ExactTable {
    capacity: usize,
    entries: HashMap<u64, i64>,
    rejected_heavy: u64,
}

impl ExactTable {
    pub fn new(capacity: usize) -> Self {
        ExactTable {
            capacity,
            entries: HashMap::new(),
            rejected_heavy: 0,
        }
    }

    /// Applies the update if the item is tracked or there is room for it.
    /// Returns false (and counts the rejection) when the table is full and
    /// the item is new; the caller must route such updates elsewhere.
    pub fn try_update(&mut self, item: u64, delta: i64) -> bool {
        if let Some(count) = self.entries.get_mut(&item) {
            *count = count.saturating_add(delta);
            return true;
        }
        if self.entries.len() < self.capacity {
            self.entries.insert(item, delta);
            return true;
        }
        self.rejected_heavy += 1;
        false
    }

    pub fn get(&self, item: u64) -> Option<i64> {
        self.entries.get(&item).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Distinct predicted-heavy items turned away because the table was
    /// full. Nonzero means the oracle flagged more items than capacity.
    pub fn rejected_heavy(&self) -> u64 {
        self.rejected_heavy
    }
}

/// Sketch with a learned routing front end: predicted-heavy items get
/// exact counts, the rest share a plain CountMin/CountSketch table.
#[derive(Debug, Clone)]
pub struct LearnedSketch {
    oracle: HeavyHitterOracle,
    exact: ExactTable,
    base: SketchTable,
    /// First routing decision per item; replayed on later updates so a
    /// noisy oracle cannot split one item across both structures.
    pinned: HashMap<u64, bool>,
}

impl LearnedSketch {
    /// `heavy_capacity` counters go to the exact table and the remaining
    /// `total_space - heavy_capacity` to the backing sketch, so the whole
    /// structure stays within the `total_space` budget.
    pub fn new(
        mode: SketchMode,
        rows: usize,
        total_space: usize,
        heavy_capacity: usize,
        oracle: HeavyHitterOracle,
        seed: HashSeed,
    ) -> Result<Self> {
        if heavy_capacity >= total_space {
            return Err(Error::InvalidParameter {
                param: "heavy_capacity",
                value: heavy_capacity.to_string(),
                constraint: "exact table must leave room for the backing sketch",
            });
        }
        let base_space = total_space - heavy_capacity;
        let base = match mode {
            SketchMode::CountMin => SketchTable::count_min(rows, base_space, seed)?,
            SketchMode::CountSketch => SketchTable::count_sketch(rows, base_space, seed)?,
        };
        Ok(LearnedSketch {
            oracle,
            exact: ExactTable::new(heavy_capacity),
            base,
            pinned: HashMap::new(),
        })
    }

    pub fn update(&mut self, u: StreamUpdate) {
        let route_exact = match self.pinned.get(&u.item) {
            Some(&r) => r,
            None => {
                let r = self.oracle.predict(u.item);
                self.pinned.insert(u.item, r);
                r
            }
        };
        if route_exact {
            if self.exact.try_update(u.item, u.delta) {
                return;
            }
            // Full table: demote the item for the rest of the run so it
            // lives entirely in the base sketch.
            self.pinned.insert(u.item, false);
        }
        self.base.update(u);
    }

    /// Exact count when tracked, base sketch estimate otherwise.
    pub fn query(&self, item: u64) -> i64 {
        match self.exact.get(item) {
            Some(count) => count,
            None => self.base.query(item),
        }
    }

    pub fn query_nonneg(&self, item: u64) -> i64 {
        self.query(item).max(0)
    }

    pub fn oracle(&self) -> &HeavyHitterOracle {
        &self.oracle
    }

    pub fn exact(&self) -> &ExactTable {
        &self.exact
    }

    pub fn base(&self) -> &SketchTable {
        &self.base
    }

    pub fn saturated(&self) -> bool {
        self.base.saturated()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn set(items: &[u64]) -> HashSet<u64> {
        items.iter().copied().collect()
    }

    #[test]
    fn perfect_oracle_answers_membership_and_counts_calls() {
        let mut o = HeavyHitterOracle::perfect(set(&[1, 2, 3, 4]));
        assert!(o.predict(1));
        assert!(o.predict(4));
        assert!(!o.predict(5));
        assert_eq!(o.queries_made(), 3);
    }

    #[test]
    fn zero_flip_noise_equals_perfect() {
        let mut perfect = HeavyHitterOracle::perfect(set(&[2, 4, 6]));
        let mut noisy = HeavyHitterOracle::noisy(set(&[2, 4, 6]), 0.0, HashSeed(99)).unwrap();
        for item in 0..10_000 {
            assert_eq!(perfect.predict(item), noisy.predict(item));
        }
    }

    #[test]
    fn full_flip_noise_inverts_perfect() {
        let mut o = HeavyHitterOracle::noisy(set(&[7]), 1.0, HashSeed(3)).unwrap();
        assert!(!o.predict(7));
        assert!(o.predict(8));
    }

    #[test]
    fn flip_prob_outside_unit_interval_rejected() {
        assert!(HeavyHitterOracle::noisy(set(&[]), 1.5, HashSeed(0)).is_err());
        assert!(HeavyHitterOracle::noisy(set(&[]), -0.1, HashSeed(0)).is_err());
    }

    #[test]
    fn lookup_file_parses_ids_and_ignores_duplicates() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "5\n17\n5\n\n  42  ").unwrap();
        let o = HeavyHitterOracle::from_lookup_file(f.path()).unwrap();
        assert_eq!(o.heavy_set_len(), 3);
    }

    #[test]
    fn lookup_file_reports_bad_line_number() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "5\nnot-a-number\n9").unwrap();
        match HeavyHitterOracle::from_lookup_file(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn lookup_file_missing_is_io_error() {
        let missing = Path::new("/nonexistent/predictions.txt");
        assert!(matches!(
            HeavyHitterOracle::from_lookup_file(missing),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn exact_table_keeps_first_comers() {
        let mut t = ExactTable::new(2);
        assert!(t.try_update(10, 1));
        assert!(t.try_update(20, 1));
        assert!(!t.try_update(30, 1));
        assert!(t.try_update(10, 4));
        assert_eq!(t.get(10), Some(5));
        assert_eq!(t.get(30), None);
        assert_eq!(t.rejected_heavy(), 1);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn heavy_only_stream_leaves_base_untouched() {
        let oracle = HeavyHitterOracle::perfect(set(&[1, 2]));
        let mut s =
            LearnedSketch::new(SketchMode::CountSketch, 3, 40, 4, oracle, HashSeed(5)).unwrap();
        for _ in 0..50 {
            s.update(StreamUpdate::new(1, 2));
            s.update(StreamUpdate::new(2, 1));
        }
        assert!(s.base().counters().iter().all(|&c| c == 0));
        assert_eq!(s.query(1), 100);
        assert_eq!(s.query(2), 50);
    }

    #[test]
    fn always_false_oracle_matches_plain_sketch() {
        let seed = HashSeed(11);
        let oracle = HeavyHitterOracle::perfect(HashSet::new());
        let mut learned =
            LearnedSketch::new(SketchMode::CountSketch, 3, 64, 4, oracle, seed).unwrap();
        let mut plain = SketchTable::count_sketch(3, 60, seed).unwrap();
        for i in 0..200u64 {
            let u = StreamUpdate::new(i % 17, 1 + (i % 3) as i64);
            learned.update(u);
            plain.update(u);
        }
        for item in 0..30 {
            assert_eq!(learned.query(item), plain.query(item));
        }
    }

    #[test]
    fn overflowed_heavy_item_is_demoted_to_base() {
        let oracle = HeavyHitterOracle::perfect(set(&[1, 2, 3]));
        let mut s =
            LearnedSketch::new(SketchMode::CountMin, 1, 9, 2, oracle, HashSeed(8)).unwrap();
        s.update(StreamUpdate::new(1, 10));
        s.update(StreamUpdate::new(2, 10));
        s.update(StreamUpdate::new(3, 7));
        s.update(StreamUpdate::new(3, 7));
        assert_eq!(s.exact().rejected_heavy(), 1);
        assert_eq!(s.exact().len(), 2);
        // Item 3 lives in the CountMin base; alone there, so exact.
        assert_eq!(s.query(3), 14);
        assert_eq!(s.oracle().queries_made(), 3);
    }

    #[test]
    fn untracked_item_in_empty_base_is_zero() {
        let oracle = HeavyHitterOracle::perfect(set(&[1]));
        let s = LearnedSketch::new(SketchMode::CountSketch, 3, 40, 4, oracle, HashSeed(2)).unwrap();
        assert_eq!(s.query(999), 0);
    }

    #[test]
    fn exact_capacity_must_leave_sketch_space() {
        let oracle = HeavyHitterOracle::perfect(HashSet::new());
        assert!(
            LearnedSketch::new(SketchMode::CountMin, 3, 10, 10, oracle, HashSeed(0)).is_err()
        );
    }
}
