use netscreen_core::counts::{counts_bundle, counts_bundle_for, marginal_counts_for, quad_cell};
use netscreen_core::dataset::{Feature, Level, NodeDataset, RawDataset};
use netscreen_core::plr::PlrBaseline;
use netscreen_core::plr_statistic;
use netscreen_core::screening::{feature_column, plr_sis, Cutoff, PairCoding, ScreenOptions};
use proptest::prelude::*;

fn arb_dataset() -> impl Strategy<Value = NodeDataset> {
    (3usize..14, 2usize..4, 2usize..6).prop_flat_map(|(n, r, p)| {
        let y = proptest::collection::vec(1..=r as Level, n);
        let ks = proptest::collection::vec(2usize..4, p);
        let edges = proptest::collection::vec((0..n, 0..n), 0..n * 3);
        (Just(r), y, ks, edges).prop_flat_map(move |(r, y, ks, edges)| {
            let cols = ks
                .iter()
                .map(|&k| proptest::collection::vec(1..=k as Level, n))
                .collect::<Vec<_>>();
            (Just(r), Just(y), Just(ks), Just(edges), cols)
        })
    })
    .prop_filter_map("every response level present", |(r, mut y, ks, edges, columns)| {
        for (l, slot) in (1..=r as Level).zip(y.iter_mut()) {
            *slot = l;
        }
        let mut edges: Vec<_> = edges.into_iter().filter(|(a, b)| a != b).collect();
        edges.sort_unstable();
        edges.dedup();
        RawDataset {
            y,
            columns,
            edges,
            feature_names: None,
            response_levels: Some(r),
            column_levels: Some(ks.into_iter().map(Some).collect()),
        }
        .validate()
        .ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn statistics_follow_their_column_when_columns_are_reordered(ds in arb_dataset(), rot in 0usize..6) {
        let p = ds.p();
        let order: Vec<usize> = (0..p).map(|i| (i + rot) % p).collect();
        let shuffled = ds.select_columns(&order).unwrap();
        for (new, &old) in order.iter().enumerate() {
            let a = plr_statistic(&ds, old).unwrap();
            let b = plr_statistic(&shuffled, new).unwrap();
            prop_assert_eq!(a.lambda, b.lambda);
        }
    }

    #[test]
    fn pair_and_edge_tables_match_enumeration(ds in arb_dataset(), j in 0usize..6) {
        let j = j % ds.p();
        let c = counts_bundle(&ds, j).unwrap();
        let (r, k) = (ds.r_levels(), ds.k_levels(j));
        let mut pairs = vec![0u64; r * r * k * k];
        let mut edges = vec![0u64; r * r * k * k];
        let (y, x) = (ds.response(), ds.column(j));
        for a in 0..ds.n() {
            for b in 0..ds.n() {
                if a == b {
                    continue;
                }
                let cell = quad_cell(r, k, y[a] as usize - 1, y[b] as usize - 1, x[a] as usize - 1, x[b] as usize - 1);
                pairs[cell] += 1;
                if ds.graph().has_edge(a, b) {
                    edges[cell] += 1;
                }
            }
        }
        prop_assert_eq!(&c.pairs.n_pairs_yj, &pairs);
        prop_assert_eq!(&c.edges.n_edges_yj, &edges);
        prop_assert_eq!(c.edges.n_edges_y.iter().sum::<u64>(), ds.graph().edge_count() as u64);
    }

    #[test]
    fn interaction_margins_equal_the_joint_tally(ds in arb_dataset()) {
        prop_assume!(ds.p() >= 2);
        let (kj, kk) = (ds.k_levels(0), ds.k_levels(1));
        let (x, levels) = feature_column(&ds, Feature::Pair(0, 1), PairCoding::Composite);
        prop_assert_eq!(levels, kj * kk);
        let m = marginal_counts_for(&ds, &x, levels);
        let r = ds.r_levels();
        let mut joint = vec![0u64; r * kj * kk];
        for i in 0..ds.n() {
            let (yi, a, b) = (ds.response()[i] as usize - 1, ds.column(0)[i] as usize - 1, ds.column(1)[i] as usize - 1);
            joint[(yi * kj + a) * kk + b] += 1;
        }
        prop_assert_eq!(&m.n_yj, &joint);
    }

    #[test]
    fn scoring_through_counts_matches_direct_scoring(ds in arb_dataset()) {
        let base = PlrBaseline::new(&ds).unwrap();
        for j in 0..ds.p() {
            let direct = plr_statistic(&ds, j).unwrap();
            let via = base.statistic_from_counts(&counts_bundle_for(&ds, ds.column(j), ds.k_levels(j)));
            prop_assert!((direct.lambda - via.lambda).abs() <= 1e-12 * direct.lambda.abs().max(1.0));
        }
    }

    #[test]
    fn hard_cutoff_selects_the_top_scores(ds in arb_dataset(), d in 1usize..6) {
        let d = d.min(ds.p());
        let opts = ScreenOptions { cutoff: Cutoff::Hard(d), ..ScreenOptions::default() };
        let res = plr_sis(&ds, &opts).unwrap();
        prop_assert_eq!(res.selected.len(), d);
        let kept = res.ranking[..d].iter().map(|&i| res.scores[i]).fold(f64::INFINITY, f64::min);
        let dropped = res.ranking[d..].iter().map(|&i| res.scores[i]).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(kept >= dropped);
        if let Some(c) = res.c_star_hat {
            prop_assert!(kept >= c);
        }
    }

    #[test]
    fn statistic_is_nonnegative_and_unchanged_by_column_duplication(ds in arb_dataset()) {
        let twice = ds.select_columns(&[0, 0]).unwrap();
        let a = plr_statistic(&twice, 0).unwrap();
        let b = plr_statistic(&twice, 1).unwrap();
        prop_assert_eq!(a.lambda, b.lambda);
        prop_assert!(a.lambda >= -1e-12);
    }
}
