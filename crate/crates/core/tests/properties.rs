//! Randomized invariants: linearity, sign symmetry, dominance,
//! threshold monotonicity, scale equivariance, and budget caps.

use std::collections::{HashMap, HashSet};

use proptest::prelude::*;

use freqsketch::{
    weighted_error, BasicTailSketch, GroundTruth, HashSeed, HeavyHitterOracle, LayerScale,
    LayeredSketch, LearnedSketch, SketchMode, SketchTable, StreamUpdate,
};

fn update_strategy(insertion_only: bool) -> impl Strategy<Value = StreamUpdate> {
    let delta = if insertion_only {
        (1i64..=8).boxed()
    } else {
        prop_oneof![1i64..=8, -8i64..=-1].boxed()
    };
    (1u64..=16, delta).prop_map(|(item, delta)| StreamUpdate::new(item, delta))
}

fn stream_strategy(insertion_only: bool) -> impl Strategy<Value = Vec<StreamUpdate>> {
    prop::collection::vec(update_strategy(insertion_only), 0..64)
}

fn fill(mut table: SketchTable, updates: &[StreamUpdate]) -> SketchTable {
    for &u in updates {
        table.update(u);
    }
    table
}

proptest! {
    #[test]
    fn concatenation_adds_counters(
        s1 in stream_strategy(false),
        s2 in stream_strategy(false),
        seed in 0u64..1000,
    ) {
        for mode in [SketchMode::CountMin, SketchMode::CountSketch] {
            let fresh = || match mode {
                SketchMode::CountMin => SketchTable::count_min(3, 12, HashSeed(seed)).unwrap(),
                SketchMode::CountSketch => {
                    SketchTable::count_sketch(3, 12, HashSeed(seed)).unwrap()
                }
            };
            let a = fill(fresh(), &s1);
            let b = fill(fresh(), &s2);
            let mut both = s1.clone();
            both.extend_from_slice(&s2);
            let ab = fill(fresh(), &both);
            let summed: Vec<i64> = a
                .counters()
                .iter()
                .zip(b.counters())
                .map(|(x, y)| x + y)
                .collect();
            prop_assert_eq!(ab.counters(), &summed[..]);
        }
    }

    #[test]
    fn negating_the_stream_negates_count_sketch(
        s in stream_strategy(false),
        seed in 0u64..1000,
    ) {
        let pos = fill(SketchTable::count_sketch(3, 12, HashSeed(seed)).unwrap(), &s);
        let negated: Vec<StreamUpdate> =
            s.iter().map(|u| StreamUpdate::new(u.item, -u.delta)).collect();
        let neg = fill(
            SketchTable::count_sketch(3, 12, HashSeed(seed)).unwrap(),
            &negated,
        );
        let flipped: Vec<i64> = pos.counters().iter().map(|&c| -c).collect();
        prop_assert_eq!(neg.counters(), &flipped[..]);
        for item in 1..=16u64 {
            prop_assert_eq!(neg.query(item), -pos.query(item));
        }
    }

    #[test]
    fn count_min_dominates_on_insertions(
        s in stream_strategy(true),
        seed in 0u64..1000,
    ) {
        let table = fill(SketchTable::count_min(2, 8, HashSeed(seed)).unwrap(), &s);
        let gt = GroundTruth::from_updates(&s);
        for item in 1..=16u64 {
            prop_assert!(table.query(item) >= gt.freq_of(item));
        }
    }

    #[test]
    fn raising_the_threshold_only_zeroes_estimates(
        s in stream_strategy(false),
        seed in 0u64..1000,
        lo in 0u8..40,
        extra in 0u8..40,
    ) {
        let mut sketch =
            LayeredSketch::new(3, 24, 16, LayerScale::Full, HashSeed(seed)).unwrap();
        for &u in &s {
            sketch.update(u);
        }
        let t1 = lo as f64;
        let t2 = (lo + extra) as f64;
        for item in 1..=16u64 {
            sketch.set_threshold(t1);
            let q1 = sketch.query(item);
            sketch.set_threshold(t2);
            let q2 = sketch.query(item);
            prop_assert!(q2 == q1 || q2 == 0, "q1={q1} q2={q2} t1={t1} t2={t2}");
        }
    }

    #[test]
    fn tail_value_scales_with_the_square_of_the_stream(
        s in stream_strategy(false),
        seed in 0u64..1000,
        a in 2i64..=5,
    ) {
        let mut base = BasicTailSketch::with_sign_count(4, 8, HashSeed(seed)).unwrap();
        let mut scaled = BasicTailSketch::with_sign_count(4, 8, HashSeed(seed)).unwrap();
        for &u in &s {
            base.update(u);
            scaled.update(StreamUpdate::new(u.item, u.delta * a));
        }
        let expect = base.finalize() * (a * a) as f64;
        let got = scaled.finalize();
        prop_assert!(
            (got - expect).abs() <= expect.abs() * 1e-12 + 1e-9,
            "got={got} expect={expect}"
        );
    }

    #[test]
    fn exact_table_never_exceeds_capacity(
        s in stream_strategy(false),
        heavy in prop::collection::hash_set(1u64..=16, 0..12),
        capacity in 1usize..6,
    ) {
        let oracle = HeavyHitterOracle::perfect(heavy.iter().copied().collect::<HashSet<u64>>());
        let mut sketch = LearnedSketch::new(
            SketchMode::CountSketch,
            3,
            12 + capacity,
            capacity,
            oracle,
            HashSeed(7),
        )
        .unwrap();
        for &u in &s {
            sketch.update(u);
            prop_assert!(sketch.exact().len() <= capacity);
        }
    }

    #[test]
    fn weighted_error_scales_linearly_in_the_deviations(
        s in stream_strategy(true).prop_filter("needs weight", |s| !s.is_empty()),
        devs in prop::collection::vec(-6i64..=6, 16),
        k in 2i64..=4,
    ) {
        let gt = GroundTruth::from_updates(&s);
        let mut est1: HashMap<u64, i64> = HashMap::new();
        let mut est2: HashMap<u64, i64> = HashMap::new();
        for (item, f) in gt.iter() {
            let d = devs[(item - 1) as usize];
            est1.insert(item, f + d);
            est2.insert(item, f + k * d);
        }
        let e1 = weighted_error(&gt, &est1).unwrap();
        let e2 = weighted_error(&gt, &est2).unwrap();
        let expect = e1 * k as f64;
        prop_assert!(
            (e2 - expect).abs() <= expect.abs() * 1e-12 + 1e-9,
            "e1={e1} e2={e2} k={k}"
        );
    }
}
