//! CART weak learners, discrete AdaBoost, Gini importance and stratified
//! cross-validation.

mod boost;
mod cv;
mod dump;
mod importance;
mod matrix;
mod tree;

pub use boost::{fit_adaboost, fit_adaboost_traced, round_weight, squash, BoostParams, BoostTrace, BoostedEnsemble, MIN_ERROR};
pub use cv::{cross_validate, harmonic, stratified_folds, Confusion, CvReport};
pub use dump::{dump_ensemble, load_ensemble, DUMP_FORMAT};
pub use importance::{gini_importance, gini_importance_with, FeatureImportance, ImportanceWeighting};
pub use matrix::{FeatureValues, SparseMatrix};
pub use tree::{fit_tree, gini_impurity, SplitChoice, TreeNode, GAIN_TOLERANCE};
