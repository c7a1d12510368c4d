use std::collections::BTreeSet;

use fuzzy_artmap::tar::{
    compute_metrics, review_loop, run_topic, select_seed, ReviewState, TopicRunConfig,
};
use fuzzy_artmap::vectorize::{FeatureMatrix, Scaling, SparseRow};
use proptest::prelude::*;

fn corpus() -> impl Strategy<Value = (FeatureMatrix, Vec<bool>)> {
    (1usize..=4, 12usize..=80).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(prop::collection::vec(0.0f64..=1.0, m), n),
            prop::collection::vec(prop::bool::weighted(0.3), n),
        )
            .prop_map(move |(points, mut rel)| {
                rel[0] = true;
                let rows = points.iter().map(|p| SparseRow::from_dense(p)).collect();
                (FeatureMatrix::new(m, rows, Scaling::RowMax).unwrap(), rel)
            })
    })
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("doc-{i:04}")).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn review_invariants((m, rel) in corpus(), seed: u64, batch in 1usize..=15, rho in 0.0f64..=1.0) {
        let ids = ids(m.len());
        let mut cfg = TopicRunConfig::new("t", seed);
        cfg.seed_relevant = 3;
        cfg.seed_nonrelevant = 5;
        cfg.batch_size = batch;
        cfg.params.rho = rho;
        let sel = select_seed(&rel, &cfg).unwrap();
        let mut state = ReviewState::seeded(&m, &ids, &rel, &sel, cfg.params).unwrap();
        let mut recall = compute_metrics(&state, &rel).recall;
        let mut iterations = 0;
        loop {
            let before = state.unreviewed().len();
            let reviewed_before = state.reviewed().len();
            if !state.step(&m, &ids, &rel, cfg.batch_size).unwrap() {
                prop_assert_eq!(state.unreviewed().len(), before);
                break;
            }
            iterations += 1;
            prop_assert!(iterations <= m.len());
            prop_assert!(state.unreviewed().len() < before);
            prop_assert!(state.reviewed().len() - reviewed_before <= batch);
            let r = compute_metrics(&state, &rel).recall;
            prop_assert!(r >= recall);
            recall = r;

            let seen: BTreeSet<usize> = state.reviewed().iter().map(|r| r.doc).collect();
            prop_assert_eq!(seen.len(), state.reviewed().len());
            prop_assert!(seen.is_disjoint(state.unreviewed()));
            prop_assert_eq!(seen.len() + state.unreviewed().len(), m.len());
        }
        let metrics = compute_metrics(&state, &rel);
        prop_assert!((0.0..=1.0).contains(&metrics.recall));
        prop_assert!((0.0..=1.0).contains(&metrics.precision));
        prop_assert!((0.0..=1.0).contains(&metrics.f1));
    }

    #[test]
    fn runs_are_reproducible((m, rel) in corpus(), seed: u64) {
        let ids = ids(m.len());
        let mut cfg = TopicRunConfig::new("t", seed);
        cfg.seed_relevant = 2;
        cfg.seed_nonrelevant = 4;
        cfg.batch_size = 5;
        let a = run_topic(&m, &ids, &rel, &cfg).unwrap();
        let b = run_topic(&m, &ids, &rel, &cfg).unwrap();
        prop_assert_eq!(a.state.reviewed(), b.state.reviewed());
        prop_assert_eq!(a.metrics, b.metrics);
        prop_assert_eq!(a.state.model(), b.state.model());
    }

    #[test]
    fn loop_matches_manual_steps((m, rel) in corpus(), seed: u64) {
        let ids = ids(m.len());
        let mut cfg = TopicRunConfig::new("t", seed);
        cfg.seed_relevant = 2;
        cfg.seed_nonrelevant = 3;
        cfg.batch_size = 4;
        let sel = select_seed(&rel, &cfg).unwrap();
        let state = ReviewState::seeded(&m, &ids, &rel, &sel, cfg.params).unwrap();
        let looped = review_loop(state.clone(), &m, &ids, &rel, &cfg).unwrap();
        let mut manual = state;
        while manual.step(&m, &ids, &rel, cfg.batch_size).unwrap() {}
        prop_assert_eq!(looped.reviewed(), manual.reviewed());
    }
}
