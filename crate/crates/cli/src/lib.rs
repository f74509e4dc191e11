//! Command-line driver: corpus preparation, both experiment suites, score
//! inspection and the scoring service.

pub mod artifacts;
pub mod commands;
pub mod config;
