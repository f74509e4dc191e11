//! Criterion benchmarks for the scoring, boosting, ranking and simulation
//! hot paths. Run with `cargo bench -p leakscope-bench`.
