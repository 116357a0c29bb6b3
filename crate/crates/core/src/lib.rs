//! Simulation testbed for tuning the parameters of a semi-honest secure
//! multi-party dot product with tabular reinforcement learning.
//!
//! The crate is organized bottom-up:
//!
//! * [`ring`] — fixed-width modular integers (the share domain).
//! * [`protocol`] — additive secret sharing, Beaver-triple multiplication,
//!   and a lockstep message bus that meters every byte, message, and
//!   sequential round of a protocol execution.
//! * [`costmodel`] — analytic network/compute time and a security score for
//!   a metered execution.
//! * [`environment`] — a finite deterministic MDP over a grid of protocol
//!   parameters (verification rounds, batch size, ring width).
//! * [`agent`] — tabular Q-learning with epsilon-greedy or softmax
//!   exploration, plus greedy rollouts and a drift-aware continuous mode.
//! * [`baselines`] — exhaustive grid search, budgeted random search, and
//!   value iteration, used as references for the learned policies.
//!
//! Everything is deterministic given the seeds passed in: repeated runs with
//! the same inputs produce bit-identical shares, ledgers, rewards, and
//! Q-tables.

// Negated float comparisons in validators are deliberate: `!(v > 0.0)`
// rejects NaN, which `v <= 0.0` would wave through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agent;
pub mod baselines;
pub mod costmodel;
pub mod environment;
mod error;
pub mod protocol;
pub mod ring;
pub mod seed;

pub use error::{Error, Result};
