//! Independent reference implementations used by the integration and
//! acceptance suites. Nothing here calls into the code under test except to
//! obtain fitted objects to compare against.
#![allow(dead_code)]

use std::collections::BTreeMap;

use leakscope_core::deanon::DeanonIndex;
use leakscope_core::ensemble::TreeNode;
use num::{BigInt, BigRational, One, Signed, Zero};

pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Weighted gini mass `W * (1 - Σ (w_c/W)^2)` in exact arithmetic.
fn weighted_impurity(pos: &BigRational, neg: &BigRational) -> BigRational {
    let total = pos + neg;
    if total.is_zero() {
        return BigRational::zero();
    }
    let p = pos / &total;
    let q = neg / &total;
    &total * (BigRational::one() - &p * &p - &q * &q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSplit {
    pub feature: usize,
    pub threshold: f64,
    /// `W_node i(node) - W_L i(L) - W_R i(R)`, unnormalized.
    pub gain: BigRational,
}

/// Exhaustive search over every feature and every midpoint between
/// consecutive distinct values; ties go to the lowest feature, then the
/// lowest threshold.
pub fn best_split(rows: &[Vec<f64>], y: &[bool], w: &[f64]) -> Option<OracleSplit> {
    let weights: Vec<BigRational> = w.iter().map(|&v| rational(v)).collect();
    let mass = |take: &dyn Fn(usize) -> bool| {
        let mut pos = BigRational::zero();
        let mut neg = BigRational::zero();
        for i in 0..rows.len() {
            if take(i) {
                if y[i] {
                    pos += &weights[i];
                } else {
                    neg += &weights[i];
                }
            }
        }
        (pos, neg)
    };
    let (p, n) = mass(&|_| true);
    let parent = weighted_impurity(&p, &n);
    let num_features = rows.first().map_or(0, Vec::len);
    let mut best: Option<OracleSplit> = None;
    for f in 0..num_features {
        let mut values: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for pair in values.windows(2) {
            let threshold = (pair[0] + pair[1]) / 2.0;
            let (lp, ln) = mass(&|i| rows[i][f] <= threshold);
            let (rp, rn) = mass(&|i| rows[i][f] > threshold);
            let gain = &parent - weighted_impurity(&lp, &ln) - weighted_impurity(&rp, &rn);
            if !gain.is_positive() {
                continue;
            }
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(OracleSplit { feature: f, threshold, gain });
            }
        }
    }
    best
}

/// Checks every internal node of `tree` against [`best_split`] on the
/// samples that reach it. Returns a description of the first mismatch.
pub fn check_tree_splits(tree: &TreeNode, rows: &[Vec<f64>], y: &[bool], w: &[f64], depth_left: usize) -> Result<(), String> {
    let root_weight: f64 = w.iter().sum();
    check_node(tree, rows, y, w, &(0..rows.len()).collect::<Vec<_>>(), depth_left, root_weight)
}

fn check_node(
    node: &TreeNode,
    rows: &[Vec<f64>],
    y: &[bool],
    w: &[f64],
    members: &[usize],
    depth_left: usize,
    root_weight: f64,
) -> Result<(), String> {
    let sub_rows: Vec<Vec<f64>> = members.iter().map(|&i| rows[i].clone()).collect();
    let sub_y: Vec<bool> = members.iter().map(|&i| y[i]).collect();
    let sub_w: Vec<f64> = members.iter().map(|&i| w[i]).collect();
    let expected = if depth_left == 0 { None } else { best_split(&sub_rows, &sub_y, &sub_w) };
    match (node, expected) {
        (TreeNode::Leaf { .. }, None) => Ok(()),
        (TreeNode::Leaf { .. }, Some(e)) => Err(format!("leaf where oracle splits on feature {} at {}", e.feature, e.threshold)),
        (TreeNode::Split { feature, threshold, .. }, None) => {
            Err(format!("split on feature {feature} at {threshold} where oracle stops"))
        }
        (
            TreeNode::Split {
                feature,
                threshold,
                gini_decrease,
                left,
                right,
            },
            Some(e),
        ) => {
            if *feature != e.feature || *threshold != e.threshold {
                return Err(format!(
                    "split ({feature}, {threshold}) differs from oracle ({}, {})",
                    e.feature, e.threshold
                ));
            }
            let expected_decrease = e.gain / rational(root_weight);
            let got = rational(*gini_decrease);
            let diff = (&got - &expected_decrease).abs();
            if diff > BigRational::new(BigInt::one(), BigInt::from(10u64).pow(12)) {
                return Err(format!("gini decrease {gini_decrease} differs from oracle"));
            }
            let (l, r): (Vec<usize>, Vec<usize>) = members.iter().partition(|&&i| rows[i][*feature] <= *threshold);
            check_node(left, rows, y, w, &l, depth_left - 1, root_weight)?;
            check_node(right, rows, y, w, &r, depth_left - 1, root_weight)
        }
    }
}

/// Raw importance by walking every node of every tree.
pub fn tree_walk_importance(trees: &[TreeNode], num_features: usize) -> Vec<f64> {
    fn walk(node: &TreeNode, acc: &mut [f64]) {
        if let TreeNode::Split {
            feature,
            gini_decrease,
            left,
            right,
            ..
        } = node
        {
            acc[*feature] += *gini_decrease;
            walk(left, acc);
            walk(right, acc);
        }
    }
    let mut acc = vec![0.0; num_features];
    for t in trees {
        walk(t, &mut acc);
    }
    acc
}

fn tree_predict(node: &TreeNode, x: &[f64]) -> bool {
    match node {
        TreeNode::Leaf { class_weights } => class_weights[1] > class_weights[0],
        TreeNode::Split {
            feature,
            threshold,
            left,
            right,
            ..
        } => {
            if x[*feature] <= *threshold {
                tree_predict(left, x)
            } else {
                tree_predict(right, x)
            }
        }
    }
}

pub struct Replay {
    pub trees: Vec<TreeNode>,
    pub alphas: Vec<f64>,
    /// Normalized weights after each kept round.
    pub weights: Vec<Vec<f64>>,
}

/// Discrete AdaBoost replayed from its update rule: weak learners come from
/// `fit_weak`, everything else is recomputed here.
pub fn replay_adaboost(
    rows: &[Vec<f64>],
    y: &[bool],
    rounds: usize,
    mut fit_weak: impl FnMut(&[f64]) -> TreeNode,
) -> Replay {
    const EPS_MIN: f64 = 1e-10;
    let n = rows.len();
    let mut w = vec![1.0 / n as f64; n];
    let mut out = Replay {
        trees: Vec::new(),
        alphas: Vec::new(),
        weights: Vec::new(),
    };
    for _ in 0..rounds {
        let tree = fit_weak(&w);
        let wrong: Vec<bool> = (0..n).map(|i| tree_predict(&tree, &rows[i]) != y[i]).collect();
        let eps: f64 = (0..n).filter(|&i| wrong[i]).map(|i| w[i]).sum();
        if eps >= 0.5 {
            break;
        }
        if eps <= 0.0 {
            out.alphas.push(0.5 * ((1.0 - EPS_MIN) / EPS_MIN).ln());
            out.trees.push(tree);
            out.weights.push(w.clone());
            break;
        }
        let alpha = 0.5 * ((1.0 - eps) / eps).ln();
        for i in 0..n {
            if wrong[i] {
                w[i] *= alpha.exp();
            }
        }
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= s);
        out.alphas.push(alpha);
        out.trees.push(tree);
        out.weights.push(w.clone());
    }
    out
}

/// Sign of the weighted vote, zero counting as positive.
pub fn replay_vote(replay: &Replay, x: &[f64]) -> bool {
    let m: f64 = replay
        .trees
        .iter()
        .zip(&replay.alphas)
        .map(|(t, a)| if tree_predict(t, x) { *a } else { -*a })
        .sum();
    m >= 0.0
}

/// Exact smoothed-product likelihood of `query` (term -> count, terms
/// outside `vocab` included) under each user's training counts.
pub fn brute_force_ranking(
    users: &BTreeMap<String, BTreeMap<String, u64>>,
    vocab: &[String],
    query: &BTreeMap<String, u64>,
    delta: u64,
) -> Vec<String> {
    let v = vocab.len() as u64;
    let mut scored: Vec<(String, BigRational)> = users
        .iter()
        .map(|(u, counts)| {
            let total: u64 = counts.values().sum();
            let denom = BigInt::from(total + delta * v);
            let mut product = BigRational::one();
            for (term, &c) in query {
                let num = BigInt::from(counts.get(term).copied().unwrap_or(0) + delta);
                let p = BigRational::new(num, denom.clone());
                for _ in 0..c {
                    product *= &p;
                }
            }
            (u.clone(), product)
        })
        .collect();
    scored.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.into_iter().map(|(u, _)| u).collect()
}

/// Small deterministic generator for fixtures (xorshift64*).
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

/// At most eight samples over at most three features, both classes present.
pub fn small_dataset(rng: &mut Lcg) -> (Vec<Vec<f64>>, Vec<bool>) {
    let n = 2 + rng.below(7) as usize;
    let f = 1 + rng.below(3) as usize;
    let rows = (0..n)
        .map(|_| (0..f).map(|_| rng.below(4) as f64 * 0.5).collect())
        .collect();
    let mut y: Vec<bool> = (0..n).map(|_| rng.below(2) == 1).collect();
    y[0] = true;
    y[1] = false;
    (rows, y)
}

pub fn twelve_sample_fixture() -> (Vec<Vec<f64>>, Vec<bool>) {
    let rows = vec![
        vec![0.0, 1.0, 3.0],
        vec![1.0, 0.0, 2.5],
        vec![2.0, 1.0, 0.0],
        vec![3.0, 2.0, 1.0],
        vec![0.5, 3.0, 2.0],
        vec![1.5, 2.5, 0.5],
        vec![2.5, 0.5, 1.5],
        vec![3.5, 1.5, 3.5],
        vec![0.0, 2.0, 1.0],
        vec![1.0, 3.5, 0.0],
        vec![2.0, 0.0, 2.0],
        vec![3.0, 3.0, 3.0],
    ];
    let y = vec![true, false, true, false, true, true, false, false, true, false, false, true];
    (rows, y)
}

pub const WORDS: [&str; 20] = [
    "ka", "lo", "mi", "nu", "pe", "ra", "si", "tu", "vo", "we", "xa", "yo", "zu", "ba", "ce", "di", "fo", "gu", "hi", "jo",
];

/// Five users over at most twenty distinct words.
pub fn toy_index(rng: &mut Lcg) -> (DeanonIndex, BTreeMap<String, Vec<String>>) {
    let mut texts = BTreeMap::new();
    let vocab_limit = 4 + rng.below(17) as usize;
    for u in 0..(2 + rng.below(4)) {
        let n = rng.below(30) as usize;
        let words: Vec<String> = (0..n).map(|_| WORDS[rng.below(vocab_limit as u64) as usize].to_string()).collect();
        texts.insert(format!("user{u}"), words);
    }
    let users: Vec<(String, Vec<String>)> = texts.iter().map(|(u, w)| (u.clone(), vec![w.join(" ")])).collect();
    // guarantee a nonempty vocabulary
    let mut users = users;
    users[0].1.push("ka".into());
    texts.get_mut("user0").unwrap().push("ka".into());
    (DeanonIndex::from_texts(&users, 1.0).unwrap(), texts)
}

/// Per-user term counts of the texts behind [`toy_index`].
pub fn toy_counts(texts: &BTreeMap<String, Vec<String>>) -> BTreeMap<String, BTreeMap<String, u64>> {
    texts
        .iter()
        .map(|(u, ws)| {
            let mut m = BTreeMap::new();
            for w in ws {
                *m.entry(w.clone()).or_insert(0) += 1;
            }
            (u.clone(), m)
        })
        .collect()
}
