//! Experiment harness.
//!
//! A plan names one dataset, a list of algorithm configurations, a space
//! grid, and a trial count. Every (algorithm, space, trial) cell builds a
//! fresh instance from a seed mixed out of those coordinates, replays the
//! same stream, queries every item the stream contained, and reduces to
//! one [`ErrorReport`] row. Cells run in parallel; rows are post-sorted,
//! so the emitted CSV is a pure function of the plan and base seed.
//! Timing is off by default for that reason and opt-in via
//! `measure_time`.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hash::{mix64, HashSeed};
use crate::layered::{
    compute_threshold, tables_for_domain, LayerScale, LayeredSketch, LearnedLayered,
    ParsimoniousSketch, PracticalSketch, SampleMode, ThresholdMode,
};
use crate::learned::LearnedSketch;
use crate::metrics::{unweighted_error, weighted_error};
use crate::sketch::{SketchMode, SketchTable, StreamUpdate};
use crate::stream::{
    build_oracle, fingerprint64, read_stream, zipf_updates, GroundTruth, OracleSpec,
    StreamFormat, ZipfSpec,
};
use crate::tail::{TailEstimator, DEFAULT_SIGN_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgoKind {
    CountMin,
    CountSketch,
    LearnedCountMin,
    LearnedCountSketch,
    Layered,
    LearnedLayered,
    Parsimonious,
    Practical,
}

impl AlgoKind {
    pub fn label(self) -> &'static str {
        match self {
            AlgoKind::CountMin => "cm",
            AlgoKind::CountSketch => "cs",
            AlgoKind::LearnedCountMin => "learned-cm",
            AlgoKind::LearnedCountSketch => "learned-cs",
            AlgoKind::Layered => "layered",
            AlgoKind::LearnedLayered => "learned-layered",
            AlgoKind::Parsimonious => "parsimonious",
            AlgoKind::Practical => "practical",
        }
    }

    fn median_query(self) -> bool {
        matches!(self, AlgoKind::CountSketch | AlgoKind::LearnedCountSketch)
    }

    fn thresholded(self) -> bool {
        matches!(self, AlgoKind::Layered | AlgoKind::LearnedLayered)
    }
}

/// One algorithm column of the experiment grid. `label` becomes the CSV
/// algorithm value and salts the per-cell seeds, so it must be unique
/// within a plan.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoConfig {
    pub label: String,
    pub kind: AlgoKind,
    pub rows: usize,
    /// Clamp every estimate at zero before scoring.
    pub nonneg: bool,
    pub oracle: OracleSpec,
    /// Exact-table capacity for oracle-backed kinds; space/2 when unset.
    pub heavy_capacity: Option<usize>,
    /// Threshold constant: scales the layered threshold, and is the C in
    /// the practical sketch's C*n/w.
    pub c_thr: f64,
    /// Oracle query-rate constant for the parsimonious kind.
    pub gamma: f64,
    /// Layered kinds only: spend half the budget on a tail estimator and
    /// threshold at the square root of its value.
    pub worst_case: bool,
    /// Parsimonious only: position-based sampling instead of
    /// known-total-weight sampling.
    pub anytime: bool,
}

impl AlgoConfig {
    pub fn new(kind: AlgoKind) -> Self {
        AlgoConfig {
            label: kind.label().to_string(),
            kind,
            rows: 3,
            nonneg: false,
            oracle: OracleSpec::Perfect,
            heavy_capacity: None,
            c_thr: 1.0,
            gamma: 1.0,
            worst_case: false,
            anytime: false,
        }
    }
}

/// Where the stream comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    Zipf(ZipfSpec),
    /// Trace file. The domain size (used by thresholds) is taken to be
    /// the stream's distinct item count.
    File { path: PathBuf, format: StreamFormat },
}

/// Materializes the stream once: (updates, ground truth, domain size).
/// Zipf streams draw their shuffle from `HashSeed(base_seed)`, the same
/// seed the generation command uses.
pub fn load_dataset(
    dataset: &DatasetSpec,
    base_seed: u64,
) -> Result<(Vec<StreamUpdate>, GroundTruth, u64)> {
    match dataset {
        DatasetSpec::Zipf(spec) => {
            let updates = zipf_updates(spec, HashSeed(base_seed));
            let gt = GroundTruth::from_updates(&updates);
            Ok((updates, gt, spec.n))
        }
        DatasetSpec::File { path, format } => {
            let (updates, gt) = read_stream(path, *format)?;
            let n = gt.distinct() as u64;
            Ok((updates, gt, n))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub dataset: DatasetSpec,
    pub algorithms: Vec<AlgoConfig>,
    pub spaces: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    pub measure_time: bool,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter {
                param: "trials",
                value: "0".to_string(),
                constraint: "at least one trial is required",
            });
        }
        if self.spaces.is_empty() {
            return Err(Error::InvalidParameter {
                param: "spaces",
                value: "[]".to_string(),
                constraint: "the space grid must be nonempty",
            });
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidParameter {
                param: "algorithms",
                value: "[]".to_string(),
                constraint: "at least one algorithm is required",
            });
        }
        let mut labels = HashSet::new();
        for cfg in &self.algorithms {
            if !labels.insert(cfg.label.as_str()) {
                return Err(Error::InvalidParameter {
                    param: "label",
                    value: cfg.label.clone(),
                    constraint: "algorithm labels must be unique, they salt the seeds",
                });
            }
            if cfg.rows == 0 {
                return Err(Error::InvalidParameter {
                    param: "rows",
                    value: "0".to_string(),
                    constraint: "a sketch needs at least one row",
                });
            }
            if cfg.kind.median_query() && cfg.rows % 2 == 0 {
                return Err(Error::InvalidParameter {
                    param: "rows",
                    value: cfg.rows.to_string(),
                    constraint: "CountSketch kinds need odd rows for a well-defined median",
                });
            }
            if cfg.worst_case && !cfg.kind.thresholded() {
                return Err(Error::InvalidParameter {
                    param: "worst_case",
                    value: cfg.label.clone(),
                    constraint: "worst-case thresholding applies only to layered kinds",
                });
            }
            if cfg.anytime && cfg.kind != AlgoKind::Parsimonious {
                return Err(Error::InvalidParameter {
                    param: "anytime",
                    value: cfg.label.clone(),
                    constraint: "anytime sampling applies only to the parsimonious kind",
                });
            }
        }
        Ok(())
    }
}

/// One CSV row. `infeasible` marks cells that could not run (for example
/// a space budget too small for the table shape); their error fields are
/// NaN in the CSV. `saturated` marks counter overflow during ingestion.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub algorithm: String,
    pub space: usize,
    pub trial: usize,
    pub seed: u64,
    pub weighted_error: f64,
    pub unweighted_error: f64,
    pub oracle_queries: u64,
    pub wall_time_ms: f64,
    pub saturated: bool,
    pub infeasible: bool,
}

enum Instance {
    Plain(SketchTable),
    Learned(LearnedSketch),
    Layered {
        sketch: LayeredSketch,
        estimator: Option<TailEstimator>,
    },
    LearnedLayered {
        sketch: LearnedLayered,
        estimator: Option<TailEstimator>,
    },
    Parsimonious(ParsimoniousSketch),
    Practical(PracticalSketch),
}

/// Tail estimator sized to roughly `budget` counters: each copy costs its
/// sign count in accumulators, with at least the 3 copies the rank
/// statistic needs; the sampling range tracks the big-table width.
fn build_estimator(budget: usize, n_domain: u64, seed: HashSeed) -> Result<TailEstimator> {
    let copies = (budget / DEFAULT_SIGN_COUNT).max(3);
    let range = (budget / tables_for_domain(n_domain)).max(1);
    TailEstimator::new(copies, range, seed)
}

fn build_instance(
    cfg: &AlgoConfig,
    space: usize,
    n_domain: u64,
    gt: &GroundTruth,
    cell: HashSeed,
) -> Result<Instance> {
    let sketch_seed = cell.child(0);
    let oracle_seed = cell.child(1);
    let estimator_seed = cell.child(2);
    let heavy = cfg.heavy_capacity.unwrap_or(space / 2);
    match cfg.kind {
        AlgoKind::CountMin => Ok(Instance::Plain(SketchTable::count_min(
            cfg.rows,
            space,
            sketch_seed,
        )?)),
        AlgoKind::CountSketch => Ok(Instance::Plain(SketchTable::count_sketch(
            cfg.rows,
            space,
            sketch_seed,
        )?)),
        AlgoKind::LearnedCountMin | AlgoKind::LearnedCountSketch => {
            let mode = if cfg.kind == AlgoKind::LearnedCountMin {
                SketchMode::CountMin
            } else {
                SketchMode::CountSketch
            };
            let oracle = build_oracle(gt, heavy, &cfg.oracle, oracle_seed)?;
            Ok(Instance::Learned(LearnedSketch::new(
                mode,
                cfg.rows,
                space,
                heavy,
                oracle,
                sketch_seed,
            )?))
        }
        AlgoKind::Layered => {
            if cfg.worst_case {
                let half = space / 2;
                let sketch =
                    LayeredSketch::new(cfg.rows, half, n_domain, LayerScale::Full, sketch_seed)?;
                let estimator = build_estimator(half, n_domain, estimator_seed)?;
                audit_space(
                    space,
                    sketch.total_counters() + estimator.total_accumulators(),
                )?;
                Ok(Instance::Layered {
                    sketch,
                    estimator: Some(estimator),
                })
            } else {
                Ok(Instance::Layered {
                    sketch: LayeredSketch::new(
                        cfg.rows,
                        space,
                        n_domain,
                        LayerScale::Full,
                        sketch_seed,
                    )?,
                    estimator: None,
                })
            }
        }
        AlgoKind::LearnedLayered => {
            let oracle = build_oracle(gt, heavy, &cfg.oracle, oracle_seed)?;
            if cfg.worst_case {
                let quarter = space / 4;
                let layered =
                    LayeredSketch::new(cfg.rows, quarter, n_domain, LayerScale::Full, sketch_seed)?;
                let estimator = build_estimator(quarter, n_domain, estimator_seed)?;
                audit_space(
                    space,
                    heavy + layered.total_counters() + estimator.total_accumulators(),
                )?;
                Ok(Instance::LearnedLayered {
                    sketch: LearnedLayered::from_parts(oracle, heavy, layered),
                    estimator: Some(estimator),
                })
            } else {
                Ok(Instance::LearnedLayered {
                    sketch: LearnedLayered::new(
                        cfg.rows,
                        space,
                        heavy,
                        n_domain,
                        oracle,
                        sketch_seed,
                    )?,
                    estimator: None,
                })
            }
        }
        AlgoKind::Parsimonious => {
            let oracle = build_oracle(gt, heavy, &cfg.oracle, oracle_seed)?;
            let mode = if cfg.anytime {
                SampleMode::Anytime
            } else {
                SampleMode::KnownLength {
                    total_weight: gt.total_weight() as f64,
                }
            };
            Ok(Instance::Parsimonious(ParsimoniousSketch::new(
                cfg.rows,
                space,
                heavy,
                n_domain,
                cfg.gamma,
                mode,
                oracle,
                sketch_seed,
            )?))
        }
        AlgoKind::Practical => Ok(Instance::Practical(PracticalSketch::new(
            space,
            cfg.c_thr,
            n_domain,
            sketch_seed,
        )?)),
    }
}

fn audit_space(budget: usize, used: usize) -> Result<()> {
    if used > budget {
        return Err(Error::InvalidParameter {
            param: "space",
            value: budget.to_string(),
            constraint: "budget too small for this layout (worst-case mode needs room for the tail estimator)",
        });
    }
    Ok(())
}

impl Instance {
    fn update(&mut self, u: StreamUpdate) {
        match self {
            Instance::Plain(t) => t.update(u),
            Instance::Learned(s) => s.update(u),
            Instance::Layered { sketch, estimator } => {
                sketch.update(u);
                if let Some(e) = estimator {
                    e.update(u);
                }
            }
            Instance::LearnedLayered { sketch, estimator } => {
                sketch.update(u);
                if let Some(e) = estimator {
                    e.update(u);
                }
            }
            Instance::Parsimonious(s) => s.update(u),
            Instance::Practical(s) => s.update(u),
        }
    }

    /// Thresholded kinds pick their zeroing level after ingestion, either
    /// from the stream weight or from the tail estimate.
    fn apply_threshold(
        &mut self,
        cfg: &AlgoConfig,
        space: usize,
        n_domain: u64,
        total_weight: f64,
    ) -> Result<()> {
        let theoretical = ThresholdMode::Theoretical { c_thr: cfg.c_thr };
        match self {
            Instance::Layered { sketch, estimator } => {
                let mode = match estimator {
                    Some(e) => ThresholdMode::WorstCase {
                        tail_value: e.finalize(),
                    },
                    None => theoretical,
                };
                sketch.set_threshold(compute_threshold(n_domain, space, total_weight, mode)?);
            }
            Instance::LearnedLayered { sketch, estimator } => {
                let mode = match estimator {
                    Some(e) => ThresholdMode::WorstCase {
                        tail_value: e.finalize(),
                    },
                    None => theoretical,
                };
                sketch.set_threshold(compute_threshold(n_domain, space, total_weight, mode)?);
            }
            Instance::Parsimonious(s) => {
                s.set_threshold(compute_threshold(n_domain, space, total_weight, theoretical)?);
            }
            _ => {}
        }
        Ok(())
    }

    fn query(&self, item: u64, nonneg: bool) -> i64 {
        macro_rules! q {
            ($s:expr) => {
                if nonneg {
                    $s.query_nonneg(item)
                } else {
                    $s.query(item)
                }
            };
        }
        match self {
            Instance::Plain(t) => q!(t),
            Instance::Learned(s) => q!(s),
            Instance::Layered { sketch, .. } => q!(sketch),
            Instance::LearnedLayered { sketch, .. } => q!(sketch),
            Instance::Parsimonious(s) => q!(s),
            Instance::Practical(s) => q!(s),
        }
    }

    fn oracle_queries(&self) -> u64 {
        match self {
            Instance::Learned(s) => s.oracle().queries_made(),
            Instance::LearnedLayered { sketch, .. } => sketch.oracle().queries_made(),
            Instance::Parsimonious(s) => s.oracle_queries(),
            _ => 0,
        }
    }

    fn saturated(&self) -> bool {
        match self {
            Instance::Plain(t) => t.saturated(),
            Instance::Learned(s) => s.saturated(),
            Instance::Layered { sketch, .. } => sketch.saturated(),
            Instance::LearnedLayered { sketch, .. } => sketch.saturated(),
            Instance::Parsimonious(s) => s.saturated(),
            Instance::Practical(s) => s.saturated(),
        }
    }
}

/// Per-cell seed: base seed mixed with the algorithm label's fingerprint,
/// the space, and the trial index, so no two cells share sketch seeds.
fn cell_seed(base_seed: u64, label: &str, space: usize, trial: usize) -> u64 {
    let s = mix64(base_seed ^ fingerprint64(label));
    let s = mix64(s ^ space as u64);
    mix64(s ^ trial as u64)
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    updates: &[StreamUpdate],
    gt: &GroundTruth,
    n_domain: u64,
    cfg: &AlgoConfig,
    space: usize,
    trial: usize,
    base_seed: u64,
    measure_time: bool,
) -> ErrorReport {
    let seed = cell_seed(base_seed, &cfg.label, space, trial);
    let start = measure_time.then(Instant::now);
    let mut report = ErrorReport {
        algorithm: cfg.label.clone(),
        space,
        trial,
        seed,
        weighted_error: f64::NAN,
        unweighted_error: f64::NAN,
        oracle_queries: 0,
        wall_time_ms: 0.0,
        saturated: false,
        infeasible: false,
    };
    let outcome = (|| -> Result<(HashMap<u64, i64>, u64, bool)> {
        let mut inst = build_instance(cfg, space, n_domain, gt, HashSeed(seed))?;
        for u in updates {
            inst.update(*u);
        }
        inst.apply_threshold(cfg, space, n_domain, gt.total_weight() as f64)?;
        let mut estimates = HashMap::with_capacity(gt.distinct());
        for (item, _) in gt.iter() {
            estimates.insert(item, inst.query(item, cfg.nonneg));
        }
        Ok((estimates, inst.oracle_queries(), inst.saturated()))
    })();
    match outcome {
        Ok((estimates, queries, saturated)) => {
            report.oracle_queries = queries;
            report.saturated = saturated;
            report.unweighted_error = unweighted_error(gt, &estimates);
            match weighted_error(gt, &estimates) {
                Ok(w) => report.weighted_error = w,
                Err(_) => report.infeasible = true,
            }
        }
        Err(_) => report.infeasible = true,
    }
    if let Some(start) = start {
        report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    report
}

/// Runs every cell of the plan and returns rows sorted by (algorithm,
/// space, trial). Infeasible cells produce NaN rows; the run continues.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<Vec<ErrorReport>> {
    let (updates, gt, n_domain) = load_dataset(&plan.dataset, plan.base_seed)?;
    run_experiment_on(&updates, &gt, n_domain, plan)
}

/// [`run_experiment`] against an already-loaded stream; `plan.dataset` is
/// ignored. Useful when the caller needs the ground truth anyway.
pub fn run_experiment_on(
    updates: &[StreamUpdate],
    gt: &GroundTruth,
    n_domain: u64,
    plan: &ExperimentPlan,
) -> Result<Vec<ErrorReport>> {
    plan.validate()?;
    let mut cells = Vec::new();
    for cfg in &plan.algorithms {
        for &space in &plan.spaces {
            for trial in 0..plan.trials {
                cells.push((cfg, space, trial));
            }
        }
    }
    let mut reports: Vec<ErrorReport> = cells
        .par_iter()
        .map(|&(cfg, space, trial)| {
            run_cell(
                updates,
                gt,
                n_domain,
                cfg,
                space,
                trial,
                plan.base_seed,
                plan.measure_time,
            )
        })
        .collect();
    reports.sort_by(|a, b| {
        a.algorithm
            .cmp(&b.algorithm)
            .then(a.space.cmp(&b.space))
            .then(a.trial.cmp(&b.trial))
    });
    Ok(reports)
}

pub const CSV_HEADER: &str =
    "algorithm,space,trial,seed,weighted_error,unweighted_error,oracle_queries,wall_time_ms";

/// Fixed-schema CSV: one header line, LF endings, floats at full
/// round-trip precision (NaN for infeasible cells).
pub fn reports_to_csv(reports: &[ErrorReport]) -> String {
    let mut out = String::with_capacity(64 * (reports.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.algorithm,
            r.space,
            r.trial,
            r.seed,
            r.weighted_error,
            r.unweighted_error,
            r.oracle_queries,
            r.wall_time_ms
        ));
    }
    out
}

pub fn write_csv(path: &Path, reports: &[ErrorReport]) -> Result<()> {
    std::fs::write(path, reports_to_csv(reports)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::StreamOrder;

    fn tiny_zipf() -> DatasetSpec {
        DatasetSpec::Zipf(ZipfSpec::new(50, 50.0, 1.0, StreamOrder::Shuffled).unwrap())
    }

    fn plan(algorithms: Vec<AlgoConfig>, spaces: Vec<usize>, trials: usize) -> ExperimentPlan {
        ExperimentPlan {
            dataset: tiny_zipf(),
            algorithms,
            spaces,
            trials,
            base_seed: 1234,
            measure_time: false,
        }
    }

    #[test]
    fn single_cell_yields_single_row() {
        let p = plan(vec![AlgoConfig::new(AlgoKind::CountMin)], vec![30], 1);
        let rows = run_experiment(&p).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].algorithm, "cm");
        assert_eq!(rows[0].space, 30);
        assert!(!rows[0].infeasible);
        assert!(rows[0].weighted_error.is_finite());
        assert_eq!(rows[0].wall_time_ms, 0.0);
        let csv = reports_to_csv(&rows);
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with(CSV_HEADER));
    }

    #[test]
    fn reruns_are_byte_identical() {
        let mut algos = vec![
            AlgoConfig::new(AlgoKind::CountSketch),
            AlgoConfig::new(AlgoKind::Layered),
            AlgoConfig::new(AlgoKind::LearnedCountSketch),
            AlgoConfig::new(AlgoKind::Parsimonious),
            AlgoConfig::new(AlgoKind::Practical),
        ];
        algos[3].gamma = 100.0;
        let p = plan(algos, vec![60, 120], 2);
        let a = reports_to_csv(&run_experiment(&p).unwrap());
        let b = reports_to_csv(&run_experiment(&p).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn rows_sorted_by_algorithm_space_trial() {
        let p = plan(
            vec![
                AlgoConfig::new(AlgoKind::CountSketch),
                AlgoConfig::new(AlgoKind::CountMin),
            ],
            vec![300, 60],
            2,
        );
        let rows = run_experiment(&p).unwrap();
        let key: Vec<(String, usize, usize)> = rows
            .iter()
            .map(|r| (r.algorithm.clone(), r.space, r.trial))
            .collect();
        let mut sorted = key.clone();
        sorted.sort();
        assert_eq!(key, sorted);
        assert_eq!(rows[0].algorithm, "cm");
        assert_eq!(rows[0].space, 60);
    }

    #[test]
    fn infeasible_cell_flags_row_and_run_continues() {
        let p = plan(
            vec![
                AlgoConfig::new(AlgoKind::CountMin),
                AlgoConfig::new(AlgoKind::Layered),
            ],
            vec![2],
            1,
        );
        let rows = run_experiment(&p).unwrap();
        assert_eq!(rows.len(), 2);
        let cm = rows.iter().find(|r| r.algorithm == "cm").unwrap();
        let layered = rows.iter().find(|r| r.algorithm == "layered").unwrap();
        assert!(cm.infeasible, "3 rows cannot fit in 2 counters");
        assert!(cm.weighted_error.is_nan());
        assert!(layered.infeasible);
        let csv = reports_to_csv(&rows);
        assert!(csv.contains("NaN"));
    }

    #[test]
    fn cells_never_share_seeds() {
        let p = plan(
            vec![
                AlgoConfig::new(AlgoKind::CountMin),
                AlgoConfig::new(AlgoKind::CountSketch),
            ],
            vec![30, 60, 90],
            4,
        );
        let rows = run_experiment(&p).unwrap();
        let seeds: HashSet<u64> = rows.iter().map(|r| r.seed).collect();
        assert_eq!(seeds.len(), rows.len());
    }

    #[test]
    fn plan_validation_rejects_bad_shapes() {
        assert!(plan(vec![AlgoConfig::new(AlgoKind::CountMin)], vec![30], 0)
            .validate()
            .is_err());
        assert!(plan(vec![AlgoConfig::new(AlgoKind::CountMin)], vec![], 1)
            .validate()
            .is_err());
        assert!(plan(vec![], vec![30], 1).validate().is_err());

        let mut even_cs = AlgoConfig::new(AlgoKind::CountSketch);
        even_cs.rows = 4;
        assert!(plan(vec![even_cs], vec![30], 1).validate().is_err());

        let mut wc_cm = AlgoConfig::new(AlgoKind::CountMin);
        wc_cm.worst_case = true;
        assert!(plan(vec![wc_cm], vec![30], 1).validate().is_err());

        let mut anytime_cm = AlgoConfig::new(AlgoKind::CountMin);
        anytime_cm.anytime = true;
        assert!(plan(vec![anytime_cm], vec![30], 1).validate().is_err());

        let dup = vec![
            AlgoConfig::new(AlgoKind::CountMin),
            AlgoConfig::new(AlgoKind::CountMin),
        ];
        assert!(plan(dup, vec![30], 1).validate().is_err());
    }

    #[test]
    fn oracle_backed_kinds_report_queries() {
        let mut pars = AlgoConfig::new(AlgoKind::Parsimonious);
        pars.gamma = 1e6;
        let p = plan(
            vec![AlgoConfig::new(AlgoKind::LearnedCountSketch), pars],
            vec![120],
            1,
        );
        let rows = run_experiment(&p).unwrap();
        for r in &rows {
            assert!(r.oracle_queries > 0, "{} made no oracle queries", r.algorithm);
        }
    }

    #[test]
    fn worst_case_layered_runs_when_budget_allows() {
        let mut wc = AlgoConfig::new(AlgoKind::Layered);
        wc.worst_case = true;
        let mut wcl = AlgoConfig::new(AlgoKind::LearnedLayered);
        wcl.worst_case = true;
        let p = plan(vec![wc, wcl], vec![2048], 1);
        let rows = run_experiment(&p).unwrap();
        for r in &rows {
            assert!(!r.infeasible, "{} infeasible", r.algorithm);
            assert!(r.weighted_error.is_finite());
        }
    }

    #[test]
    fn file_dataset_round_trips_through_runner() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.txt");
        std::fs::write(&path, "1 5\n2 3\n1 2\n3 1\n").unwrap();
        let p = ExperimentPlan {
            dataset: DatasetSpec::File {
                path,
                format: StreamFormat::Pairs,
            },
            algorithms: vec![AlgoConfig::new(AlgoKind::CountMin)],
            spaces: vec![9],
            trials: 1,
            base_seed: 5,
            measure_time: true,
        };
        let rows = run_experiment(&p).unwrap();
        assert_eq!(rows.len(), 1);
        // CountMin with 3 distinct items in 3 columns; error finite.
        assert!(rows[0].weighted_error.is_finite());
        assert!(rows[0].wall_time_ms >= 0.0);
    }

    #[test]
    fn timing_stays_zero_when_disabled() {
        let p = plan(vec![AlgoConfig::new(AlgoKind::CountSketch)], vec![30], 2);
        let rows = run_experiment(&p).unwrap();
        assert!(rows.iter().all(|r| r.wall_time_ms == 0.0));
    }
}
