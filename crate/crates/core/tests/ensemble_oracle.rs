mod oracles;

use leakscope_core::ensemble::{
    cross_validate, fit_adaboost, fit_adaboost_traced, fit_tree, gini_importance, BoostParams, Confusion, SparseMatrix,
    TreeNode,
};
use oracles::{check_tree_splits, replay_adaboost, replay_vote, small_dataset, tree_walk_importance, twelve_sample_fixture, Lcg};

#[test]
fn splits_match_exhaustive_search() {
    let mut rng = Lcg(0x5eed);
    for case in 0..100 {
        let (rows, y) = small_dataset(&mut rng);
        let w = vec![1.0 / rows.len() as f64; rows.len()];
        let tree = fit_tree(&SparseMatrix::from_dense(&rows), &y, &w, 3).unwrap();
        if let Err(e) = check_tree_splits(&tree, &rows, &y, &w, 3) {
            panic!("case {case}: {e}\nrows {rows:?}\nlabels {y:?}");
        }
    }
}

fn path_sums(node: &TreeNode, acc: f64, out: &mut Vec<f64>) {
    match node {
        TreeNode::Leaf { .. } => out.push(acc),
        TreeNode::Split {
            gini_decrease,
            left,
            right,
            ..
        } => {
            assert!(*gini_decrease > 0.0);
            path_sums(left, acc + gini_decrease, out);
            path_sums(right, acc + gini_decrease, out);
        }
    }
}

#[test]
fn decrease_along_any_path_is_bounded_by_root_impurity() {
    let mut rng = Lcg(77);
    for _ in 0..100 {
        let (rows, y) = small_dataset(&mut rng);
        let w = vec![1.0 / rows.len() as f64; rows.len()];
        let tree = fit_tree(&SparseMatrix::from_dense(&rows), &y, &w, 3).unwrap();
        let pos = y.iter().filter(|&&b| b).count() as f64 / y.len() as f64;
        let root = 1.0 - pos * pos - (1.0 - pos) * (1.0 - pos);
        let mut sums = Vec::new();
        path_sums(&tree, 0.0, &mut sums);
        assert!(sums.iter().all(|&s| s <= root + 1e-9), "{sums:?} > {root}");
    }
}

#[test]
fn importance_equals_tree_walk() {
    let mut rng = Lcg(4242);
    for _ in 0..100 {
        let (rows, y) = small_dataset(&mut rng);
        let e = fit_adaboost(&SparseMatrix::from_dense(&rows), &y, BoostParams { rounds: 5, max_depth: 2 }).unwrap();
        let imp = gini_importance(&e);
        assert_eq!(imp.raw, tree_walk_importance(&e.trees, e.num_features));
        let total: f64 = imp.normalized.iter().sum();
        if imp.raw.iter().any(|&r| r > 0.0) {
            assert!((total - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn adaboost_matches_replay_of_update_rule() {
    let (rows, y) = twelve_sample_fixture();
    let x = SparseMatrix::from_dense(&rows);
    let params = BoostParams { rounds: 20, max_depth: 1 };
    let (e, trace) = fit_adaboost_traced(&x, &y, params).unwrap();
    let replay = replay_adaboost(&rows, &y, params.rounds, |w| fit_tree(&x, &y, w, params.max_depth).unwrap());
    assert_eq!(e.trees.len(), replay.trees.len());
    for (a, b) in e.alphas.iter().zip(&replay.alphas) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(e.label_of(&r[..]), replay_vote(&replay, r), "sample {i}");
    }
    for w in &trace.weights {
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn training_error_non_increasing_on_separable_data() {
    let rows: Vec<Vec<f64>> = (0..16).map(|i| vec![(i % 4) as f64, (i / 4) as f64]).collect();
    let y: Vec<bool> = (0..16).map(|i| (i % 4) + (i / 4) >= 3).collect();
    let x = SparseMatrix::from_dense(&rows);
    let mut last = usize::MAX;
    for rounds in 1..=10 {
        let e = fit_adaboost(&x, &y, BoostParams { rounds, max_depth: 1 }).unwrap();
        let errors = rows.iter().zip(&y).filter(|(r, &l)| e.label_of(&r[..]) != l).count();
        assert!(errors <= last, "rounds {rounds}: {errors} > {last}");
        last = errors;
    }
}

#[test]
fn permutation_invariance() {
    let (rows, y) = twelve_sample_fixture();
    let params = BoostParams { rounds: 10, max_depth: 2 };
    let base = fit_adaboost(&SparseMatrix::from_dense(&rows), &y, params).unwrap();
    let mut rng = Lcg(9);
    for _ in 0..10 {
        let mut idx: Vec<usize> = (0..rows.len()).collect();
        for i in (1..idx.len()).rev() {
            idx.swap(i, rng.below(i as u64 + 1) as usize);
        }
        let pr: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].clone()).collect();
        let py: Vec<bool> = idx.iter().map(|&i| y[i]).collect();
        assert_eq!(fit_adaboost(&SparseMatrix::from_dense(&pr), &py, params).unwrap(), base);
    }
}

#[test]
fn two_fold_counts_match_manual_evaluation() {
    let rows: Vec<Vec<f64>> = vec![
        vec![0.0],
        vec![1.0],
        vec![2.0],
        vec![3.0],
        vec![5.0],
        vec![6.0],
        vec![7.0],
        vec![4.0],
    ];
    let y = vec![false, false, false, true, true, true, true, false];
    let x = SparseMatrix::from_dense(&rows);
    let params = BoostParams { rounds: 5, max_depth: 1 };
    let report = cross_validate(&x, &y, 2, params).unwrap();

    // positives 3,4,5,6 and negatives 0,1,2,7 each dealt over two folds
    let folds = [0, 1, 0, 0, 1, 0, 1, 1];
    assert_eq!(leakscope_core::ensemble::stratified_folds(&y, 2, None).unwrap(), (folds.to_vec(), 2));
    let mut manual = Confusion::default();
    for f in 0..2 {
        let train: Vec<usize> = (0..8).filter(|&i| folds[i] != f).collect();
        let ty: Vec<bool> = train.iter().map(|&i| y[i]).collect();
        let m = fit_adaboost(&x.select(&train), &ty, params).unwrap();
        for i in (0..8).filter(|&i| folds[i] == f) {
            manual.record(m.label_of(&rows[i][..]), y[i]);
        }
    }
    assert_eq!(report.confusion, manual);
    assert_eq!(report.confusion.total(), 8);
}
