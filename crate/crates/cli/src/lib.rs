//! Experiment runner for the integrating-factor midpoint benchmarks: config
//! handling, the `converge` and `adapt` experiments, and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod format;
