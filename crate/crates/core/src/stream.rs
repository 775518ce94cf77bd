//! Stream generation, trace ingestion, and exact ground truth.
//!
//! Synthetic streams follow a Zipfian profile: the rank-i item occurs
//! round(A / i^exponent) times. Item ids for synthetic streams are the
//! ranks themselves (1-based), so item 1 is always the most frequent;
//! ordering options only permute when each occurrence arrives, never the
//! id assignment. Trace files come in two shapes: "item delta" pairs, or
//! one raw token per line with tokens fingerprinted to stable 64-bit ids.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::hash::{HashSeed, SplitMix64};
use crate::learned::HeavyHitterOracle;
use crate::sketch::StreamUpdate;

/// Arrival order of a synthetic stream's occurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamOrder {
    /// All copies of rank 1, then rank 2, and so on.
    Sorted,
    /// Global permutation of the occurrence sequence, drawn from the
    /// generation seed.
    Shuffled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZipfSpec {
    pub n: u64,
    pub scale: f64,
    pub exponent: f64,
    pub order: StreamOrder,
}

impl ZipfSpec {
    pub fn new(n: u64, scale: f64, exponent: f64, order: StreamOrder) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                param: "n",
                value: "0".to_string(),
                constraint: "domain must hold at least one item",
            });
        }
        if scale.is_nan() || scale <= 0.0 {
            return Err(Error::InvalidParameter {
                param: "scale",
                value: scale.to_string(),
                constraint: "rank-1 frequency must be positive",
            });
        }
        if exponent.is_nan() || exponent <= 0.0 {
            return Err(Error::InvalidParameter {
                param: "exponent",
                value: exponent.to_string(),
                constraint: "decay exponent must be positive",
            });
        }
        Ok(ZipfSpec {
            n,
            scale,
            exponent,
            order,
        })
    }
}

/// Exact per-item counts plus the derived rank order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    freq: BTreeMap<u64, i64>,
    total_weight: i64,
    sorted_ranks: Vec<u64>,
}

impl GroundTruth {
    pub fn from_updates<'a, I>(updates: I) -> Self
    where
        I: IntoIterator<Item = &'a StreamUpdate>,
    {
        let mut freq = BTreeMap::new();
        let mut total_weight = 0i64;
        for u in updates {
            *freq.entry(u.item).or_insert(0) += u.delta;
            total_weight += u.delta;
        }
        let mut sorted_ranks: Vec<u64> = freq.keys().copied().collect();
        sorted_ranks.sort_by(|&a, &b| freq[&b].cmp(&freq[&a]).then(a.cmp(&b)));
        GroundTruth {
            freq,
            total_weight,
            sorted_ranks,
        }
    }

    /// Exact count, 0 for items never seen.
    pub fn freq_of(&self, item: u64) -> i64 {
        self.freq.get(&item).copied().unwrap_or(0)
    }

    pub fn total_weight(&self) -> i64 {
        self.total_weight
    }

    pub fn distinct(&self) -> usize {
        self.freq.len()
    }

    /// Item ids by descending count, ties broken by smaller id.
    pub fn sorted_ranks(&self) -> &[u64] {
        &self.sorted_ranks
    }

    /// Iterates (item, count) in ascending item order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.freq.iter().map(|(&item, &count)| (item, count))
    }

    /// The h most frequent items (all items when h exceeds the distinct
    /// count; callers wanting a warning should compare h to distinct()).
    pub fn top_items(&self, h: usize) -> HashSet<u64> {
        self.sorted_ranks
            .iter()
            .take(h)
            .copied()
            .collect()
    }
}

/// Occurrence count of each rank: round-half-up of scale / rank^exponent.
pub fn zipf_counts(spec: &ZipfSpec) -> Vec<i64> {
    (1..=spec.n)
        .map(|rank| (spec.scale / (rank as f64).powf(spec.exponent)).round() as i64)
        .collect()
}

/// Unit-weight occurrence sequence for a [`ZipfSpec`], permuted when the order
/// is `Shuffled`. Memory is proportional to the stream length.
pub fn zipf_updates(spec: &ZipfSpec, seed: HashSeed) -> Vec<StreamUpdate> {
    let counts = zipf_counts(spec);
    let total: i64 = counts.iter().sum();
    let mut items: Vec<u64> = Vec::with_capacity(total.max(0) as usize);
    for (idx, &count) in counts.iter().enumerate() {
        let item = idx as u64 + 1;
        for _ in 0..count {
            items.push(item);
        }
    }
    if spec.order == StreamOrder::Shuffled {
        let mut rng = SplitMix64::new(seed.0);
        // Fisher-Yates, back to front.
        for i in (1..items.len()).rev() {
            let j = rng.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
    items
        .into_iter()
        .map(|item| StreamUpdate::new(item, 1))
        .collect()
}

/// Generates the stream, writes it to `path` in Pairs format, and returns
/// its exact ground truth. A spec whose counts all round to zero yields
/// an empty file and a zero-weight truth.
pub fn gen_zipf(spec: &ZipfSpec, seed: HashSeed, path: &Path) -> Result<GroundTruth> {
    let updates = zipf_updates(spec, seed);
    write_pairs(path, &updates)?;
    Ok(GroundTruth::from_updates(&updates))
}

/// Writes one "item delta" line per update, LF-terminated.
pub fn write_pairs(path: &Path, updates: &[StreamUpdate]) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    for u in updates {
        writeln!(w, "{} {}", u.item, u.delta).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// Ground-truth export: "item,count" CSV in ascending item order.
pub fn write_truth(path: &Path, gt: &GroundTruth) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    w.write_all(b"item,count\n").map_err(io_err)?;
    for (item, count) in gt.iter() {
        writeln!(w, "{item},{count}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamFormat {
    /// One "item delta" pair per line, both decimal.
    Pairs,
    /// One raw token per line; tokens become ids via a stable
    /// fingerprint, each occurrence weighs 1.
    ItemsOnly,
}

/// FNV-1a 64-bit fingerprint; fixed constants keep token ids stable
/// across runs and machines.
pub fn fingerprint64(token: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for byte in token.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}

/// Reads a stream file and computes its ground truth in the same pass.
/// Blank lines are skipped; anything else that fails to parse is an
/// error naming the 1-based line.
pub fn read_stream(path: &Path, format: StreamFormat) -> Result<(Vec<StreamUpdate>, GroundTruth)> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut updates = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        match format {
            StreamFormat::Pairs => {
                let mut parts = trimmed.split_whitespace();
                let item = parts.next().and_then(|s| s.parse::<u64>().ok());
                let delta = parts.next().and_then(|s| s.parse::<i64>().ok());
                match (item, delta, parts.next()) {
                    (Some(item), Some(delta), None) => {
                        updates.push(StreamUpdate::new(item, delta))
                    }
                    _ => {
                        return Err(Error::Parse {
                            path: path.to_path_buf(),
                            line: index + 1,
                            message: format!(
                                "expected \"item delta\" with two decimal fields, got {trimmed:?}"
                            ),
                        })
                    }
                }
            }
            StreamFormat::ItemsOnly => {
                updates.push(StreamUpdate::new(fingerprint64(trimmed), 1));
            }
        }
    }
    let truth = GroundTruth::from_updates(&updates);
    Ok((updates, truth))
}

/// Oracle construction recipe; resolved against a stream's ground truth.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleSpec {
    Perfect,
    Noisy { flip_prob: f64 },
    Lookup { path: PathBuf },
}

/// Builds the oracle for a stream: Perfect and Noisy take the top-`h` set
/// from the ground truth, Lookup reads its own file and ignores `h`.
pub fn build_oracle(
    gt: &GroundTruth,
    h: usize,
    spec: &OracleSpec,
    seed: HashSeed,
) -> Result<HeavyHitterOracle> {
    match spec {
        OracleSpec::Perfect => Ok(HeavyHitterOracle::perfect(gt.top_items(h))),
        OracleSpec::Noisy { flip_prob } => {
            HeavyHitterOracle::noisy(gt.top_items(h), *flip_prob, seed)
        }
        OracleSpec::Lookup { path } => HeavyHitterOracle::from_lookup_file(path),
    }
}
