//! Command-line front end: generate Zipfian streams, replay traces
//! through the sketch implementations, export exact counts, and render
//! result plots. All randomness flows from --seed, so every artifact is
//! reproducible byte for byte (opt-in timings excepted).

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use freqsketch::{
    emit_plot, gen_zipf, load_dataset, run_experiment_on, write_csv, write_truth, AlgoConfig,
    AlgoKind, DatasetSpec, ExperimentPlan, HashSeed, OracleSpec, PlotKind, PlotMetric,
    StreamFormat, StreamOrder, ZipfSpec,
};

#[derive(Parser)]
#[command(
    name = "freqsketch",
    version,
    about = "Frequency-sketch benchmark: stream generation, algorithm sweeps, plots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a Zipfian stream file (and optionally its exact counts).
    GenZipf(GenZipfArgs),
    /// Sweep algorithms over a space grid and write a result CSV.
    Run(RunArgs),
    /// Render an SVG plot from a result CSV.
    Plot(PlotArgs),
    /// Compute exact per-item counts for a stream file.
    Truth(TruthArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Sorted,
    Shuffled,
}

impl From<OrderArg> for StreamOrder {
    fn from(o: OrderArg) -> StreamOrder {
        match o {
            OrderArg::Sorted => StreamOrder::Sorted,
            OrderArg::Shuffled => StreamOrder::Shuffled,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    /// One "item delta" pair per line.
    Pairs,
    /// One raw token per line, counted with weight 1.
    Items,
}

impl From<FormatArg> for StreamFormat {
    fn from(f: FormatArg) -> StreamFormat {
        match f {
            FormatArg::Pairs => StreamFormat::Pairs,
            FormatArg::Items => StreamFormat::ItemsOnly,
        }
    }
}

#[derive(Args)]
struct GenZipfArgs {
    /// Domain size: ranks 1..=n become item ids.
    #[arg(long)]
    n: u64,
    /// Rank-1 frequency; rank i gets round(scale / i^exponent). Defaults
    /// to n.
    #[arg(long)]
    scale: Option<f64>,
    /// Frequency decay exponent.
    #[arg(long, default_value_t = 1.0)]
    exponent: f64,
    /// Arrival order of the occurrences.
    #[arg(long, value_enum, default_value_t = OrderArg::Sorted)]
    order: OrderArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output stream file (Pairs format).
    #[arg(long)]
    out: PathBuf,
    /// Also write the exact counts as "item,count" CSV.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Synthetic Zipf stream over this domain size.
    #[arg(long, conflicts_with = "input")]
    zipf_n: Option<u64>,
    /// Zipf rank-1 frequency (defaults to the domain size).
    #[arg(long)]
    scale: Option<f64>,
    /// Zipf decay exponent.
    #[arg(long, default_value_t = 1.0)]
    exponent: f64,
    /// Zipf arrival order. Shuffled by default so arrival-order-sensitive
    /// algorithms (parsimonious sampling) see a neutral stream.
    #[arg(long, value_enum, default_value_t = OrderArg::Shuffled)]
    order: OrderArg,
    /// Replay a trace file instead of generating a stream.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Trace file format.
    #[arg(long, value_enum, default_value_t = FormatArg::Pairs)]
    format: FormatArg,
    /// Algorithm to run; repeatable. One of: cm, cs, cm-nonneg,
    /// cs-nonneg, learned-cm, learned-cs, layered, learned-layered,
    /// parsimonious, practical.
    #[arg(long = "algo", required = true)]
    algos: Vec<String>,
    /// Space budget in counters; repeatable.
    #[arg(long = "space", required = true)]
    spaces: Vec<usize>,
    /// Sketch rows.
    #[arg(long, default_value_t = 3)]
    rows: usize,
    /// Independent trials per (algorithm, space) cell.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Heavy-hitter oracle: perfect, noisy:<flip-prob>, or
    /// lookup:<file>.
    #[arg(long, default_value = "perfect")]
    oracle: String,
    /// Exact-table capacity for oracle-backed kinds; space/2 when unset.
    #[arg(long)]
    hh: Option<usize>,
    /// Threshold constant (layered kinds and the practical sketch).
    #[arg(long, default_value_t = 1.0)]
    cthr: f64,
    /// Oracle query-rate constant (parsimonious).
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Clamp every estimate at zero before scoring.
    #[arg(long)]
    nonneg: bool,
    /// Layered kinds: spend half the budget on a tail estimator and
    /// threshold at the square root of its value.
    #[arg(long)]
    worst_case_threshold: bool,
    /// Parsimonious: position-based sampling for unknown-length streams.
    #[arg(long)]
    anytime: bool,
    /// Record per-cell wall time (makes reruns non-identical).
    #[arg(long)]
    timings: bool,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// x = space, mean line with a stddev band per algorithm.
    SpaceSweep,
    /// x = trial index at one fixed space.
    Longitudinal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Weighted,
    Unweighted,
}

#[derive(Args)]
struct PlotArgs {
    /// Result CSV produced by `run`.
    #[arg(long)]
    input: PathBuf,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::SpaceSweep)]
    kind: KindArg,
    #[arg(long, value_enum, default_value_t = MetricArg::Weighted)]
    metric: MetricArg,
}

#[derive(Args)]
struct TruthArgs {
    /// Stream file to count.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Pairs)]
    format: FormatArg,
    /// Output "item,count" CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn parse_algo(name: &str) -> Result<(AlgoKind, bool)> {
    Ok(match name {
        "cm" => (AlgoKind::CountMin, false),
        "cs" => (AlgoKind::CountSketch, false),
        "cm-nonneg" => (AlgoKind::CountMin, true),
        "cs-nonneg" => (AlgoKind::CountSketch, true),
        "learned-cm" => (AlgoKind::LearnedCountMin, false),
        "learned-cs" => (AlgoKind::LearnedCountSketch, false),
        "layered" => (AlgoKind::Layered, false),
        "learned-layered" => (AlgoKind::LearnedLayered, false),
        "parsimonious" => (AlgoKind::Parsimonious, false),
        "practical" => (AlgoKind::Practical, false),
        other => bail!(
            "unknown algorithm {other:?}; expected one of: cm, cs, cm-nonneg, cs-nonneg, \
             learned-cm, learned-cs, layered, learned-layered, parsimonious, practical"
        ),
    })
}

fn parse_oracle(value: &str) -> Result<OracleSpec> {
    if value == "perfect" {
        return Ok(OracleSpec::Perfect);
    }
    if let Some(p) = value.strip_prefix("noisy:") {
        let flip_prob: f64 = p
            .parse()
            .with_context(|| format!("bad flip probability {p:?} in --oracle"))?;
        return Ok(OracleSpec::Noisy { flip_prob });
    }
    if let Some(path) = value.strip_prefix("lookup:") {
        return Ok(OracleSpec::Lookup {
            path: PathBuf::from(path),
        });
    }
    bail!("bad --oracle {value:?}; expected perfect, noisy:<p>, or lookup:<file>")
}

fn cmd_gen_zipf(args: GenZipfArgs) -> Result<()> {
    let spec = ZipfSpec::new(
        args.n,
        args.scale.unwrap_or(args.n as f64),
        args.exponent,
        args.order.into(),
    )?;
    let gt = gen_zipf(&spec, HashSeed(args.seed), &args.out)?;
    if gt.total_weight() == 0 {
        eprintln!("warning: every frequency rounded to zero; wrote an empty stream");
    }
    if let Some(truth_path) = &args.truth {
        write_truth(truth_path, &gt)?;
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let dataset = match (&args.zipf_n, &args.input) {
        (Some(n), None) => DatasetSpec::Zipf(ZipfSpec::new(
            *n,
            args.scale.unwrap_or(*n as f64),
            args.exponent,
            args.order.into(),
        )?),
        (None, Some(path)) => DatasetSpec::File {
            path: path.clone(),
            format: args.format.into(),
        },
        _ => bail!("provide a dataset: either --zipf-n <n> or --input <file>"),
    };
    let oracle = parse_oracle(&args.oracle)?;
    let mut algorithms = Vec::with_capacity(args.algos.len());
    for name in &args.algos {
        let (kind, nonneg_variant) = parse_algo(name)?;
        let mut cfg = AlgoConfig::new(kind);
        cfg.label = name.clone();
        cfg.rows = args.rows;
        cfg.nonneg = nonneg_variant || args.nonneg;
        cfg.oracle = oracle.clone();
        cfg.heavy_capacity = args.hh;
        cfg.c_thr = args.cthr;
        cfg.gamma = args.gamma;
        cfg.worst_case = args.worst_case_threshold
            && matches!(kind, AlgoKind::Layered | AlgoKind::LearnedLayered);
        cfg.anytime = args.anytime && kind == AlgoKind::Parsimonious;
        algorithms.push(cfg);
    }
    let plan = ExperimentPlan {
        dataset,
        algorithms,
        spaces: args.spaces.clone(),
        trials: args.trials,
        base_seed: args.seed,
        measure_time: args.timings,
    };

    let (updates, gt, n_domain) = load_dataset(&plan.dataset, plan.base_seed)?;
    let uses_oracle = plan.algorithms.iter().any(|c| {
        matches!(
            c.kind,
            AlgoKind::LearnedCountMin
                | AlgoKind::LearnedCountSketch
                | AlgoKind::LearnedLayered
                | AlgoKind::Parsimonious
        )
    });
    if uses_oracle {
        let max_heavy = plan
            .spaces
            .iter()
            .map(|&s| args.hh.unwrap_or(s / 2))
            .max()
            .unwrap_or(0);
        if max_heavy > gt.distinct() {
            eprintln!(
                "warning: heavy-hitter capacity {} exceeds the {} distinct items; \
                 the oracle set is every item",
                max_heavy,
                gt.distinct()
            );
        }
    }

    let reports = run_experiment_on(&updates, &gt, n_domain, &plan)?;
    let infeasible = reports.iter().filter(|r| r.infeasible).count();
    if infeasible > 0 {
        eprintln!("warning: {infeasible} infeasible cell(s) emitted NaN rows");
    }
    if reports.iter().any(|r| r.saturated) {
        eprintln!("warning: counter saturation occurred; affected estimates are clipped");
    }
    write_csv(&args.out, &reports)?;
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    let kind = match args.kind {
        KindArg::SpaceSweep => PlotKind::SpaceSweep,
        KindArg::Longitudinal => PlotKind::Longitudinal,
    };
    let metric = match args.metric {
        MetricArg::Weighted => PlotMetric::Weighted,
        MetricArg::Unweighted => PlotMetric::Unweighted,
    };
    emit_plot(&args.input, kind, metric, &args.out)?;
    Ok(())
}

fn cmd_truth(args: TruthArgs) -> Result<()> {
    let (_, gt) = freqsketch::read_stream(&args.input, args.format.into())?;
    write_truth(&args.out, &gt)?;
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::GenZipf(args) => cmd_gen_zipf(args),
        Command::Run(args) => cmd_run(args),
        Command::Plot(args) => cmd_plot(args),
        Command::Truth(args) => cmd_truth(args),
    }
}
