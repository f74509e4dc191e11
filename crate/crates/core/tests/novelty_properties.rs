use leakscope_core::ensemble::FeatureImportance;
use leakscope_core::infoscore::{informativeness, novelty, relevance, InfoParams};
use leakscope_core::TermVector;
use proptest::prelude::*;

fn sparse(max_count: u32) -> impl Strategy<Value = TermVector> {
    proptest::collection::btree_map(0usize..40, 1..=max_count, 1..15).prop_map(TermVector::from_pairs)
}

fn importance() -> FeatureImportance {
    FeatureImportance::from_raw((0..40).map(|i| if i % 3 == 0 { (i + 1) as f64 } else { 0.0 }).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bounded(seen in sparse(9), post in sparse(5), alpha in 0.01f64..4.0) {
        let nu = novelty(&seen, &post, alpha).unwrap();
        prop_assert!(nu > 0.0 && nu <= 1.0);
    }

    #[test]
    fn decays_with_seen_count(seen in sparse(9), post in sparse(5), pick in 0usize..15, bump in 1u32..5) {
        let term = post.indices().nth(pick % post.nnz()).unwrap();
        let more = seen.add(&TermVector::from_pairs([(term, bump)]));
        prop_assert!(novelty(&more, &post, 0.5).unwrap() < novelty(&seen, &post, 0.5).unwrap());
    }

    #[test]
    fn high_counts_make_posts_stale(post in sparse(1), extra in 4u32..20) {
        // every post term already seen at least four times
        let seen = TermVector::from_pairs(post.indices().map(|i| (i, extra)));
        prop_assert!(novelty(&seen, &post, 0.5).unwrap() < 0.2);
    }

    #[test]
    fn disjoint_single_occurrences_are_novel(post in sparse(1), seen in sparse(9)) {
        let shifted = TermVector::from_pairs(seen.iter().map(|(i, c)| (i + 100, c)));
        prop_assert_eq!(novelty(&shifted, &post, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn relevance_grows_with_added_features(post in sparse(3), extra in sparse(3)) {
        let imp = importance();
        prop_assert!(relevance(&post.add(&extra), &imp) >= relevance(&post, &imp));
    }

    #[test]
    fn informativeness_linear_in_lambda(seen in sparse(9), post in sparse(5), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let imp = importance();
        let s = |l: f64| informativeness(&post, &seen, &imp, &InfoParams::new(l, 0.5).unwrap()).unwrap();
        let (sa, sb) = (s(a), s(b));
        prop_assert!((0.0..=1.0).contains(&sa.informativeness));
        let mid = s((a + b) / 2.0).informativeness;
        prop_assert!((mid - (sa.informativeness + sb.informativeness) / 2.0).abs() < 1e-12);
    }
}

#[test]
fn worked_examples() {
    let all_new = novelty(&TermVector::new(), &TermVector::from_indices([1, 2, 3]), 0.5).unwrap();
    assert_eq!(all_new, 1.0);
    let four = novelty(&TermVector::from_pairs([(0, 4)]), &TermVector::from_pairs([(0, 1)]), 0.5).unwrap();
    assert!((four - 0.1353352832366127).abs() < 1e-9);
    let m1 = TermVector::from_pairs([(0, 2)]);
    let m2 = TermVector::from_pairs([(0, 1), (1, 1)]);
    let mixed = novelty(&m1, &m2, 0.5).unwrap();
    assert!((mixed - 0.6839397205857212).abs() < 1e-9);
    assert_ne!(novelty(&m2, &m1, 0.5).unwrap(), mixed);
}
