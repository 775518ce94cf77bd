//! Frequency-estimation sketches for data streams, with an evaluation
//! harness.
//!
//! The estimators, in increasing order of machinery:
//!
//! - [`SketchTable`]: classic CountMin and CountSketch.
//! - [`LearnedSketch`]: a heavy-hitter oracle routes predicted-heavy
//!   items to exact counts in front of a plain sketch.
//! - [`LayeredSketch`]: a stack of CountSketch tables whose filter
//!   median zeroes out estimates below a threshold, trading error on
//!   rare items for bias toward zero; comes in plain, learned
//!   ([`LearnedLayered`]), oracle-rationing ([`ParsimoniousSketch`]),
//!   and single-table ([`PracticalSketch`]) forms.
//! - [`TailEstimator`]: estimates the squared tail norm of the
//!   frequency vector, supplying a threshold for adversarial streams.
//!
//! Everything is deterministic given explicit seeds: hashing is
//! polynomial over a Mersenne-prime field, streams are generated or
//! ingested reproducibly, and the experiment runner and SVG plotter
//! emit byte-identical artifacts for identical inputs.

pub mod error;
pub mod hash;
pub mod layered;
pub mod learned;
pub mod metrics;
pub mod plot;
pub mod runner;
pub mod sketch;
pub mod stream;
pub mod tail;

pub use error::{Error, Result};
pub use hash::{HashSeed, KWiseHash, SignHash};
pub use layered::{
    compute_threshold, harmonic, tables_for_domain, LayerScale, LayeredSketch, LearnedLayered,
    ParsimoniousSketch, PracticalSketch, SampleMode, ThresholdMode,
};
pub use learned::{ExactTable, HeavyHitterOracle, LearnedSketch};
pub use metrics::{unweighted_error, weighted_error};
pub use plot::{emit_plot, render_plot, PlotKind, PlotMetric};
pub use runner::{
    load_dataset, reports_to_csv, run_experiment, run_experiment_on, write_csv, AlgoConfig,
    AlgoKind, DatasetSpec, ErrorReport, ExperimentPlan,
};
pub use sketch::{SketchMode, SketchTable, StreamUpdate};
pub use stream::{
    build_oracle, fingerprint64, gen_zipf, read_stream, write_pairs, write_truth, zipf_counts,
    zipf_updates, GroundTruth, OracleSpec, StreamFormat, StreamOrder, ZipfSpec,
};
pub use tail::{exact_tail_norm, BasicTailSketch, TailEstimator, DEFAULT_SIGN_COUNT};
