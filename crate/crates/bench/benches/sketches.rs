//! Update and query throughput for the four sketch families at a fixed
//! budget. Streams are Zipfian so the mix of heavy and light items
//! matches the workloads the estimators are built for.

use std::collections::HashSet;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use freqsketch::{
    GroundTruth, HashSeed, HeavyHitterOracle, LayerScale, LayeredSketch, LearnedSketch,
    SketchMode, SketchTable, StreamOrder, StreamUpdate, ZipfSpec,
};

const DOMAIN: u64 = 10_000;
const SPACE: usize = 3_000;
const ROWS: usize = 3;
const HEAVY: usize = SPACE / 2;

fn workload() -> (Vec<StreamUpdate>, GroundTruth) {
    let spec = ZipfSpec::new(DOMAIN, DOMAIN as f64, 1.0, StreamOrder::Shuffled).unwrap();
    let updates = freqsketch::zipf_updates(&spec, HashSeed(42));
    let gt = GroundTruth::from_updates(&updates);
    (updates, gt)
}

fn oracle(gt: &GroundTruth) -> HeavyHitterOracle {
    let heavy: HashSet<u64> = gt.top_items(HEAVY).into_iter().collect();
    HeavyHitterOracle::perfect(heavy)
}

fn bench_updates(c: &mut Criterion) {
    let (updates, gt) = workload();
    let mut group = c.benchmark_group("update");
    group.throughput(Throughput::Elements(updates.len() as u64));
    group.sample_size(20);

    group.bench_function("count_min", |b| {
        b.iter_batched(
            || SketchTable::count_min(ROWS, SPACE, HashSeed(1)).unwrap(),
            |mut s| {
                for &u in &updates {
                    s.update(u);
                }
                s
            },
            BatchSize::LargeInput,
        )
    });
    group.bench_function("count_sketch", |b| {
        b.iter_batched(
            || SketchTable::count_sketch(ROWS, SPACE, HashSeed(1)).unwrap(),
            |mut s| {
                for &u in &updates {
                    s.update(u);
                }
                s
            },
            BatchSize::LargeInput,
        )
    });
    group.bench_function("layered", |b| {
        b.iter_batched(
            || LayeredSketch::new(ROWS, SPACE, DOMAIN, LayerScale::Full, HashSeed(1)).unwrap(),
            |mut s| {
                for &u in &updates {
                    s.update(u);
                }
                s
            },
            BatchSize::LargeInput,
        )
    });
    group.bench_function("learned_count_sketch", |b| {
        b.iter_batched(
            || {
                LearnedSketch::new(
                    SketchMode::CountSketch,
                    ROWS,
                    SPACE,
                    HEAVY,
                    oracle(&gt),
                    HashSeed(1),
                )
                .unwrap()
            },
            |mut s| {
                for &u in &updates {
                    s.update(u);
                }
                s
            },
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

fn bench_queries(c: &mut Criterion) {
    let (updates, gt) = workload();
    let mut group = c.benchmark_group("query");
    group.throughput(Throughput::Elements(DOMAIN));
    group.sample_size(20);

    let mut cm = SketchTable::count_min(ROWS, SPACE, HashSeed(1)).unwrap();
    let mut cs = SketchTable::count_sketch(ROWS, SPACE, HashSeed(1)).unwrap();
    let mut layered =
        LayeredSketch::new(ROWS, SPACE, DOMAIN, LayerScale::Full, HashSeed(1)).unwrap();
    let mut learned = LearnedSketch::new(
        SketchMode::CountSketch,
        ROWS,
        SPACE,
        HEAVY,
        oracle(&gt),
        HashSeed(1),
    )
    .unwrap();
    for &u in &updates {
        cm.update(u);
        cs.update(u);
        layered.update(u);
        learned.update(u);
    }

    group.bench_function("count_min", |b| {
        b.iter(|| {
            let mut acc = 0i64;
            for item in 1..=DOMAIN {
                acc = acc.wrapping_add(cm.query(black_box(item)));
            }
            acc
        })
    });
    group.bench_function("count_sketch", |b| {
        b.iter(|| {
            let mut acc = 0i64;
            for item in 1..=DOMAIN {
                acc = acc.wrapping_add(cs.query(black_box(item)));
            }
            acc
        })
    });
    group.bench_function("layered", |b| {
        b.iter(|| {
            let mut acc = 0i64;
            for item in 1..=DOMAIN {
                acc = acc.wrapping_add(layered.query(black_box(item)));
            }
            acc
        })
    });
    group.bench_function("learned_count_sketch", |b| {
        b.iter(|| {
            let mut acc = 0i64;
            for item in 1..=DOMAIN {
                acc = acc.wrapping_add(learned.query(black_box(item)));
            }
            acc
        })
    });
    group.finish();
}

criterion_group!(benches, bench_updates, bench_queries);
criterion_main!(benches);
