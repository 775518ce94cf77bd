//! Layered thresholded sketches.
//!
//! A [`LayeredSketch`] stacks T CountSketch tables: T-1 narrow "filter"
//! tables vote (by median) on whether an item is frequent, and one wide
//! table supplies the returned estimate. Estimates whose filter median
//! falls below a threshold are zeroed, which trades the heavy tail of
//! CountSketch error on rare items for a bias toward 0.
//!
//! Variants here:
//! - [`LearnedLayered`]: oracle-routed exact counts in front of the
//!   layered tables.
//! - [`ParsimoniousSketch`]: same layout, but the oracle is consulted
//!   only for a sampled subset of arrivals.
//! - [`PracticalSketch`]: one CountSketch table plus a threshold, the
//!   cheap variant that keeps most of the benefit in practice.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hash::{HashSeed, SplitMix64};
use crate::learned::{ExactTable, HeavyHitterOracle};
use crate::sketch::{SketchTable, StreamUpdate};

/// Number of tables T used for a domain of size `n_domain`: grows like
/// ceil(log2 log2 n), floored at 3, then bumped so T-1 is odd and the
/// filter median is a real table estimate.
pub fn tables_for_domain(n_domain: u64) -> usize {
    let raw = if n_domain <= 2 {
        0.0
    } else {
        (n_domain as f64).log2().log2().ceil()
    };
    let mut t = raw.max(3.0) as usize;
    if (t - 1).is_multiple_of(2) {
        t += 1;
    }
    t
}

/// nth harmonic number, summed smallest term first.
pub fn harmonic(n: u64) -> f64 {
    let mut sum = 0.0;
    let mut i = n;
    while i >= 1 {
        sum += 1.0 / i as f64;
        i -= 1;
    }
    sum
}

/// How the zeroing threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdMode {
    /// theta = c_thr * T * (N / H_n) / B. The N / H_n factor rescales the
    /// analysis (which assumes a max frequency of 1) to raw counts.
    Theoretical { c_thr: f64 },
    /// theta = sqrt(V) where V estimates the squared tail norm; pairs the
    /// layered tables with a tail estimator for worst-case streams.
    WorstCase { tail_value: f64 },
}

pub fn compute_threshold(
    n_domain: u64,
    space: usize,
    total_weight: f64,
    mode: ThresholdMode,
) -> Result<f64> {
    if space == 0 {
        return Err(Error::InvalidParameter {
            param: "space",
            value: "0".to_string(),
            constraint: "threshold needs a positive space budget",
        });
    }
    if total_weight.is_nan() || total_weight < 0.0 {
        return Err(Error::InvalidParameter {
            param: "total_weight",
            value: total_weight.to_string(),
            constraint: "total stream weight must be nonnegative",
        });
    }
    match mode {
        ThresholdMode::Theoretical { c_thr } => {
            let t = tables_for_domain(n_domain) as f64;
            let scale = total_weight / harmonic(n_domain.max(1));
            Ok(c_thr * t * scale / space as f64)
        }
        ThresholdMode::WorstCase { tail_value } => Ok(tail_value.max(0.0).sqrt()),
    }
}

/// Fraction of the space budget the layered tables may use. `Full` when
/// they stand alone, `Half` when an exact table takes the other half.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerScale {
    Full,
    Half,
}

impl LayerScale {
    fn divisor(self) -> usize {
        match self {
            LayerScale::Full => 2,
            LayerScale::Half => 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LayeredSketch {
    small_tables: Vec<SketchTable>,
    big_table: SketchTable,
    threshold: f64,
    n_domain: u64,
}

impl LayeredSketch {
    /// Builds T-1 filter tables with total_space/(d*rows*T) columns each
    /// and one estimate table with total_space/(d*rows) columns, where d
    /// is 2 for `Full` scale and 4 for `Half`. Rows may be even; such
    /// tables answer with the lower middle of their sorted estimates.
    pub fn new(
        rows: usize,
        total_space: usize,
        n_domain: u64,
        scale: LayerScale,
        seed: HashSeed,
    ) -> Result<Self> {
        let t = tables_for_domain(n_domain);
        let d = scale.divisor();
        let small_cols = total_space / (d * rows.max(1) * t);
        let big_cols = total_space / (d * rows.max(1));
        if small_cols == 0 || big_cols == 0 {
            return Err(Error::InvalidParameter {
                param: "total_space",
                value: total_space.to_string(),
                constraint: "every layered table needs at least one column",
            });
        }
        let mut small_tables = Vec::with_capacity(t - 1);
        for table in 0..t - 1 {
            small_tables.push(SketchTable::count_sketch_any_rows(
                rows,
                rows * small_cols,
                seed.child(table as u64),
            )?);
        }
        let big_table =
            SketchTable::count_sketch_any_rows(rows, rows * big_cols, seed.child(t as u64 - 1))?;
        Ok(LayeredSketch {
            small_tables,
            big_table,
            threshold: 0.0,
            n_domain,
        })
    }

    /// T, counting the estimate table.
    pub fn tables(&self) -> usize {
        self.small_tables.len() + 1
    }

    pub fn n_domain(&self) -> u64 {
        self.n_domain
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn set_threshold(&mut self, theta: f64) {
        self.threshold = theta;
    }

    pub fn update(&mut self, u: StreamUpdate) {
        for table in &mut self.small_tables {
            table.update(u);
        }
        self.big_table.update(u);
    }

    /// Median of the T-1 filter-table estimates.
    pub fn filter_median(&self, item: u64) -> i64 {
        let mut vals: Vec<i64> = self.small_tables.iter().map(|t| t.query(item)).collect();
        vals.sort_unstable();
        vals[(vals.len() - 1) / 2]
    }

    /// 0 when the filter median falls below the threshold, otherwise the
    /// estimate table's answer. A zero threshold disables the filter, so
    /// the query degenerates to the estimate table alone.
    pub fn query(&self, item: u64) -> i64 {
        if self.threshold > 0.0 && (self.filter_median(item) as f64) < self.threshold {
            return 0;
        }
        self.big_table.query(item)
    }

    pub fn query_nonneg(&self, item: u64) -> i64 {
        self.query(item).max(0)
    }

    pub fn small_tables(&self) -> &[SketchTable] {
        &self.small_tables
    }

    pub fn big_table(&self) -> &SketchTable {
        &self.big_table
    }

    pub fn total_counters(&self) -> usize {
        self.small_tables
            .iter()
            .map(|t| t.total_counters())
            .sum::<usize>()
            + self.big_table.total_counters()
    }

    pub fn saturated(&self) -> bool {
        self.small_tables.iter().any(|t| t.saturated()) || self.big_table.saturated()
    }
}

/// Layered sketch with an oracle-filled exact table in front. Predicted
/// heavy items get exact counts; the rest go to layered tables built at
/// half scale so the whole structure fits the space budget.
#[derive(Debug, Clone)]
pub struct LearnedLayered {
    oracle: HeavyHitterOracle,
    exact: ExactTable,
    layered: LayeredSketch,
    pinned: HashMap<u64, bool>,
}

impl LearnedLayered {
    /// Assembles the structure from separately built parts, for layouts
    /// where the layered tables share the budget with other structures
    /// (e.g. a tail estimator). The caller owns the space audit.
    pub fn from_parts(
        oracle: HeavyHitterOracle,
        heavy_capacity: usize,
        layered: LayeredSketch,
    ) -> Self {
        LearnedLayered {
            oracle,
            exact: ExactTable::new(heavy_capacity),
            layered,
            pinned: HashMap::new(),
        }
    }

    pub fn new(
        rows: usize,
        total_space: usize,
        heavy_capacity: usize,
        n_domain: u64,
        oracle: HeavyHitterOracle,
        seed: HashSeed,
    ) -> Result<Self> {
        let layered = LayeredSketch::new(rows, total_space, n_domain, LayerScale::Half, seed)?;
        if heavy_capacity + layered.total_counters() > total_space {
            return Err(Error::InvalidParameter {
                param: "heavy_capacity",
                value: heavy_capacity.to_string(),
                constraint: "exact slots plus layered counters must fit the space budget",
            });
        }
        Ok(LearnedLayered {
            oracle,
            exact: ExactTable::new(heavy_capacity),
            layered,
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
            self.pinned.insert(u.item, false);
        }
        self.layered.update(u);
    }

    pub fn query(&self, item: u64) -> i64 {
        match self.exact.get(item) {
            Some(count) => count,
            None => self.layered.query(item),
        }
    }

    pub fn query_nonneg(&self, item: u64) -> i64 {
        self.query(item).max(0)
    }

    pub fn set_threshold(&mut self, theta: f64) {
        self.layered.set_threshold(theta);
    }

    pub fn oracle(&self) -> &HeavyHitterOracle {
        &self.oracle
    }

    pub fn exact(&self) -> &ExactTable {
        &self.exact
    }

    pub fn layered(&self) -> &LayeredSketch {
        &self.layered
    }

    pub fn saturated(&self) -> bool {
        self.layered.saturated()
    }
}

/// When the parsimonious sampler knows the stream in advance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleMode {
    /// Total stream weight m is known; arrival of weight d is sampled
    /// with probability min(1, gamma * B * (ln n)^2 * |d| / m).
    KnownLength { total_weight: f64 },
    /// Stream length unknown; the j-th arrival is sampled with
    /// probability min(1, gamma * B * (ln n)^3 / j).
    Anytime,
}

/// Learned layered sketch that rations oracle calls. An arrival of an
/// already-classified item updates its exact count directly; any other
/// arrival consults the oracle only when a weight-biased coin comes up
/// heads. Negative answers are never cached, so frequent items get many
/// chances to be classified.
#[derive(Debug, Clone)]
pub struct ParsimoniousSketch {
    oracle: HeavyHitterOracle,
    exact: ExactTable,
    layered: LayeredSketch,
    gamma: f64,
    space: usize,
    mode: SampleMode,
    position: u64,
    rng: SplitMix64,
}

impl ParsimoniousSketch {
    /// Table seeds use child indices 0..T; the sampling coins use the top
    /// child index so the two streams never share a seed.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rows: usize,
        total_space: usize,
        heavy_capacity: usize,
        n_domain: u64,
        gamma: f64,
        mode: SampleMode,
        oracle: HeavyHitterOracle,
        seed: HashSeed,
    ) -> Result<Self> {
        if gamma.is_nan() || gamma < 0.0 {
            return Err(Error::InvalidParameter {
                param: "gamma",
                value: gamma.to_string(),
                constraint: "query-rate constant must be nonnegative",
            });
        }
        if let SampleMode::KnownLength { total_weight } = mode {
            if total_weight.is_nan() || total_weight <= 0.0 {
                return Err(Error::InvalidParameter {
                    param: "total_weight",
                    value: total_weight.to_string(),
                    constraint: "known-length sampling needs a positive total weight",
                });
            }
        }
        let layered = LayeredSketch::new(rows, total_space, n_domain, LayerScale::Half, seed)?;
        if heavy_capacity + layered.total_counters() > total_space {
            return Err(Error::InvalidParameter {
                param: "heavy_capacity",
                value: heavy_capacity.to_string(),
                constraint: "exact slots plus layered counters must fit the space budget",
            });
        }
        Ok(ParsimoniousSketch {
            oracle,
            exact: ExactTable::new(heavy_capacity),
            layered,
            gamma,
            space: total_space,
            mode,
            position: 0,
            rng: SplitMix64::new(seed.child(u64::MAX).0),
        })
    }

    fn query_probability(&self, delta: i64) -> f64 {
        let log_n = (self.layered.n_domain().max(1) as f64).ln();
        let base = self.gamma * self.space as f64;
        let p = match self.mode {
            SampleMode::KnownLength { total_weight } => {
                base * log_n * log_n * (delta.unsigned_abs() as f64) / total_weight
            }
            SampleMode::Anytime => base * log_n * log_n * log_n / self.position as f64,
        };
        p.min(1.0)
    }

    pub fn update(&mut self, u: StreamUpdate) {
        self.position += 1;
        // Classified items skip both the coin and the oracle.
        if self.exact.get(u.item).is_some() {
            self.exact.try_update(u.item, u.delta);
            return;
        }
        let p = self.query_probability(u.delta);
        if p > 0.0 && self.rng.next_f64() < p && self.oracle.predict(u.item) {
            // Classification starts the exact count at this arrival;
            // earlier weight stays in the layered tables.
            if self.exact.try_update(u.item, u.delta) {
                return;
            }
        }
        self.layered.update(u);
    }

    pub fn query(&self, item: u64) -> i64 {
        match self.exact.get(item) {
            Some(count) => count,
            None => self.layered.query(item),
        }
    }

    pub fn query_nonneg(&self, item: u64) -> i64 {
        self.query(item).max(0)
    }

    pub fn set_threshold(&mut self, theta: f64) {
        self.layered.set_threshold(theta);
    }

    pub fn oracle_queries(&self) -> u64 {
        self.oracle.queries_made()
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn exact(&self) -> &ExactTable {
        &self.exact
    }

    pub fn layered(&self) -> &LayeredSketch {
        &self.layered
    }

    pub fn saturated(&self) -> bool {
        self.layered.saturated()
    }
}

/// Single 3-row CountSketch table with a fixed zeroing threshold of
/// c * n / w. Keeps the layered idea's benefit on skewed streams at a
/// fraction of the bookkeeping.
#[derive(Debug, Clone)]
pub struct PracticalSketch {
    table: SketchTable,
    c: f64,
    n_domain: u64,
}

impl PracticalSketch {
    pub fn new(total_space: usize, c: f64, n_domain: u64, seed: HashSeed) -> Result<Self> {
        if c.is_nan() || c < 0.0 {
            return Err(Error::InvalidParameter {
                param: "c",
                value: c.to_string(),
                constraint: "threshold constant must be nonnegative",
            });
        }
        Ok(PracticalSketch {
            table: SketchTable::count_sketch(3, total_space, seed)?,
            c,
            n_domain,
        })
    }

    pub fn update(&mut self, u: StreamUpdate) {
        self.table.update(u);
    }

    /// c * n / w; estimates with median below this are zeroed. c = 0
    /// turns the sketch into plain CountSketch.
    pub fn threshold(&self) -> f64 {
        self.c * self.n_domain as f64 / self.table.cols() as f64
    }

    pub fn query(&self, item: u64) -> i64 {
        let est = self.table.query(item);
        let theta = self.threshold();
        if theta > 0.0 && (est as f64) < theta {
            return 0;
        }
        est
    }

    pub fn query_nonneg(&self, item: u64) -> i64 {
        self.query(item).max(0)
    }

    pub fn table(&self) -> &SketchTable {
        &self.table
    }

    pub fn saturated(&self) -> bool {
        self.table.saturated()
    }
}
