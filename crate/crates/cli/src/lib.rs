//! Experiment harness: config ingestion, subcommand orchestration, and
//! deterministic CSV/JSON emission. Everything written to the output
//! directory is a pure function of (config, seeds).

// Negated float comparisons in validators are deliberate: `!(v > 0.0)`
// rejects NaN, which `v <= 0.0` would wave through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
