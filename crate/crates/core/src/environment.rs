//! Finite deterministic MDP over a grid of protocol parameters.
//!
//! A state is one `(verify_rounds, block_size, security_bits)` triple out
//! of the configured axes; actions nudge one axis up or down (clamped at
//! the grid edge) or stay put. The reward of entering a state combines the
//! security score with normalized time and traffic costs of running the
//! protocol there on a fixed workload, so the whole environment is a pure
//! function of its configuration and every evaluation can be memoized.

use std::fmt;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::costmodel::{security_score, ComputeModel, ExecutionMetrics, NetworkModel};
use crate::protocol::{run_dot_product, ProtocolParams};
use crate::seed::{derive, rng_from};
use crate::{Error, Result};

/// Substream tags: protocol randomness and network jitter per state.
const RUN_TAG: u64 = 0x7275_6e73;
const NET_TAG: u64 = 0x6e65_7473;

/// Flattened grid index; row-major over (rounds, block, sec), with the
/// security axis fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The seven parameter moves, in fixed ordinal order. Ties between equal
/// Q-values are always broken toward the lowest ordinal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    IncRounds,
    DecRounds,
    IncBlock,
    DecBlock,
    IncSec,
    DecSec,
    Stay,
}

impl Action {
    pub const COUNT: usize = 7;
    pub const ALL: [Action; Action::COUNT] = [
        Action::IncRounds,
        Action::DecRounds,
        Action::IncBlock,
        Action::DecBlock,
        Action::IncSec,
        Action::DecSec,
        Action::Stay,
    ];

    pub fn index(self) -> usize {
        Action::ALL.iter().position(|&a| a == self).expect("listed")
    }

    pub fn from_index(index: usize) -> Result<Action> {
        Action::ALL
            .get(index)
            .copied()
            .ok_or_else(|| Error::InvalidUsage(format!("action index {index} out of range")))
    }

    /// (axis, direction) of the move; `None` for `Stay`.
    fn delta(self) -> Option<(usize, isize)> {
        match self {
            Action::IncRounds => Some((0, 1)),
            Action::DecRounds => Some((0, -1)),
            Action::IncBlock => Some((1, 1)),
            Action::DecBlock => Some((1, -1)),
            Action::IncSec => Some((2, 1)),
            Action::DecSec => Some((2, -1)),
            Action::Stay => None,
        }
    }
}

/// Axes of the search grid plus the fixed workload shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub rounds_axis: Vec<usize>,
    pub block_axis: Vec<usize>,
    pub sec_axis: Vec<u32>,
    pub parties: usize,
    pub workload_len: usize,
}

impl Default for ParamGrid {
    fn default() -> Self {
        ParamGrid {
            rounds_axis: vec![1, 2, 3, 4],
            block_axis: vec![1, 2, 4, 8, 16],
            sec_axis: vec![32, 64, 128],
            parties: 3,
            workload_len: 16,
        }
    }
}

impl ParamGrid {
    pub fn validate(&self) -> Result<()> {
        for (name, axis) in [("rounds_axis", &self.rounds_axis), ("block_axis", &self.block_axis)]
        {
            if axis.is_empty() {
                return Err(Error::InvalidConfig(format!("{name} must not be empty")));
            }
            if axis[0] < 1 {
                return Err(Error::InvalidConfig(format!("{name} values must be >= 1")));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be strictly increasing"
                )));
            }
        }
        if self.sec_axis.is_empty() {
            return Err(Error::InvalidConfig("sec_axis must not be empty".into()));
        }
        if self.sec_axis.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "sec_axis must be strictly increasing".into(),
            ));
        }
        for &bits in &self.sec_axis {
            if crate::ring::RingWidth::from_bits(bits).is_err() {
                return Err(Error::InvalidConfig(format!(
                    "sec_axis entries must be one of 32, 64, 128, got {bits}"
                )));
            }
        }
        if self.parties < 2 {
            return Err(Error::InvalidConfig(format!(
                "parties must be >= 2, got {}",
                self.parties
            )));
        }
        if self.workload_len < 1 {
            return Err(Error::InvalidConfig("workload_len must be >= 1".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rounds_axis.len() * self.block_axis.len() * self.sec_axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.len()).map(StateId)
    }

    pub fn state_at(&self, i_rounds: usize, i_block: usize, i_sec: usize) -> StateId {
        debug_assert!(
            i_rounds < self.rounds_axis.len()
                && i_block < self.block_axis.len()
                && i_sec < self.sec_axis.len()
        );
        StateId((i_rounds * self.block_axis.len() + i_block) * self.sec_axis.len() + i_sec)
    }

    pub fn coords(&self, state: StateId) -> Result<(usize, usize, usize)> {
        if state.0 >= self.len() {
            return Err(Error::InvalidUsage(format!(
                "state {state} out of range for a {}-state grid",
                self.len()
            )));
        }
        let i_sec = state.0 % self.sec_axis.len();
        let rest = state.0 / self.sec_axis.len();
        Ok((rest / self.block_axis.len(), rest % self.block_axis.len(), i_sec))
    }

    pub fn params(&self, state: StateId) -> Result<ProtocolParams> {
        let (i_rounds, i_block, i_sec) = self.coords(state)?;
        Ok(ProtocolParams {
            parties: self.parties,
            security_bits: self.sec_axis[i_sec],
            block_size: self.block_axis[i_block],
            verify_rounds: self.rounds_axis[i_rounds],
            workload_len: self.workload_len,
        })
    }
}

/// Coefficients of the scalar reward; all must be non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub w_t: f64,
    pub w_c: f64,
    pub w_s: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights {
            w_t: 1.0,
            w_c: 1.0,
            w_s: 1.0,
        }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [("w_t", self.w_t), ("w_c", self.w_c), ("w_s", self.w_s)] {
            if !(v >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{key} must be >= 0, got {v}"
                )));
            }
        }
        if self.w_t == 0.0 && self.w_c == 0.0 && self.w_s == 0.0 {
            return Err(Error::InvalidConfig(
                "at least one of w_t, w_c, w_s must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Result of taking one action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub next_state: StateId,
    pub reward: f64,
    pub metrics: ExecutionMetrics,
}

type Evaluation = (f64, ExecutionMetrics);

/// The tuning environment: grid, cost models, fixed workload, and a
/// write-once evaluation cache.
#[derive(Debug)]
pub struct Environment {
    grid: ParamGrid,
    network: NetworkModel,
    compute: ComputeModel,
    weights: RewardWeights,
    t_ref: f64,
    c_ref: f64,
    workload_seed: u64,
    workload_x: Vec<u128>,
    workload_y: Vec<u128>,
    memo: Vec<OnceLock<Result<Evaluation>>>,
}

impl Environment {
    /// Builds the environment and fixes the reward normalizers.
    ///
    /// `normalizers` overrides `(t_ref, c_ref)`; by default both come from
    /// the metrics of the reference state (the minimal index on every
    /// axis), computed here once so they stay frozen for the lifetime of
    /// the environment, drift included.
    pub fn new(
        grid: ParamGrid,
        network: NetworkModel,
        compute: ComputeModel,
        weights: RewardWeights,
        normalizers: Option<(f64, f64)>,
        workload_seed: u64,
    ) -> Result<Self> {
        grid.validate()?;
        network.validate()?;
        compute.validate()?;
        weights.validate()?;

        let mut rng = rng_from(derive(workload_seed, &[]));
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
            u128::from(rng.gen::<u64>()) | u128::from(rng.gen::<u64>()) << 64
        };
        let workload_x: Vec<u128> = (0..grid.workload_len).map(|_| draw(&mut rng)).collect();
        let workload_y: Vec<u128> = (0..grid.workload_len).map(|_| draw(&mut rng)).collect();

        let (t_ref, c_ref) = match normalizers {
            Some(pair) => pair,
            None => {
                let reference = state_metrics(
                    &grid,
                    &network,
                    &compute,
                    &workload_x,
                    &workload_y,
                    workload_seed,
                    StateId(0),
                )?;
                (reference.time_ms, reference.bytes as f64)
            }
        };
        if !(t_ref > 0.0) || !(c_ref > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "reward normalizers must be > 0, got t_ref={t_ref}, c_ref={c_ref}"
            )));
        }

        let memo = (0..grid.len()).map(|_| OnceLock::new()).collect();
        Ok(Environment {
            grid,
            network,
            compute,
            weights,
            t_ref,
            c_ref,
            workload_seed,
            workload_x,
            workload_y,
            memo,
        })
    }

    pub fn grid(&self) -> &ParamGrid {
        &self.grid
    }

    pub fn network(&self) -> &NetworkModel {
        &self.network
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }

    pub fn c_ref(&self) -> f64 {
        self.c_ref
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        self.grid.states()
    }

    /// Swaps the network model mid-experiment and drops every cached
    /// evaluation. The reward normalizers stay frozen so rewards before and
    /// after the switch remain comparable.
    pub fn set_network_model(&mut self, network: NetworkModel) -> Result<()> {
        network.validate()?;
        self.network = network;
        self.memo = (0..self.grid.len()).map(|_| OnceLock::new()).collect();
        Ok(())
    }

    /// Reward and metrics of `state`, computed at most once.
    pub fn evaluate(&self, state: StateId) -> Result<Evaluation> {
        if state.0 >= self.grid.len() {
            return Err(Error::InvalidUsage(format!(
                "state {state} out of range for a {}-state grid",
                self.grid.len()
            )));
        }
        self.memo[state.0]
            .get_or_init(|| {
                let metrics = state_metrics(
                    &self.grid,
                    &self.network,
                    &self.compute,
                    &self.workload_x,
                    &self.workload_y,
                    self.workload_seed,
                    state,
                )?;
                Ok((self.reward_from_metrics(&metrics), metrics))
            })
            .clone()
    }

    /// `w_s * S - w_t * time/t_ref - w_c * bytes/c_ref`.
    pub fn reward_from_metrics(&self, metrics: &ExecutionMetrics) -> f64 {
        self.weights.w_s * metrics.security_score
            - self.weights.w_t * (metrics.time_ms / self.t_ref)
            - self.weights.w_c * (metrics.bytes as f64 / self.c_ref)
    }

    /// Applies `action` to `state` with clamping; never leaves the grid.
    pub fn transition(&self, state: StateId, action: Action) -> Result<StateId> {
        let (mut i_r, mut i_b, mut i_k) = self.grid.coords(state)?;
        if let Some((axis, dir)) = action.delta() {
            let (idx, len) = match axis {
                0 => (&mut i_r, self.grid.rounds_axis.len()),
                1 => (&mut i_b, self.grid.block_axis.len()),
                _ => (&mut i_k, self.grid.sec_axis.len()),
            };
            let moved = idx.saturating_add_signed(dir);
            *idx = moved.min(len - 1);
        }
        Ok(self.grid.state_at(i_r, i_b, i_k))
    }

    /// One MDP step: clamped move, then the reward of arriving at the next
    /// state.
    pub fn step(&self, state: StateId, action: Action) -> Result<StepOutcome> {
        let next_state = self.transition(state, action)?;
        let (reward, metrics) = self.evaluate(next_state)?;
        Ok(StepOutcome {
            next_state,
            reward,
            metrics,
        })
    }

    /// Uniformly random start state.
    pub fn reset(&self, rng: &mut impl Rng) -> StateId {
        StateId(rng.gen_range(0..self.grid.len()))
    }

    pub fn reset_seeded(&self, seed: u64) -> StateId {
        self.reset(&mut rng_from(seed))
    }
}

/// Runs the protocol at `state` and prices it; free function so the
/// constructor can use it before the environment exists.
fn state_metrics(
    grid: &ParamGrid,
    network: &NetworkModel,
    compute: &ComputeModel,
    x: &[u128],
    y: &[u128],
    workload_seed: u64,
    state: StateId,
) -> Result<ExecutionMetrics> {
    let params = grid.params(state)?;
    let run_seed = derive(workload_seed, &[RUN_TAG, state.0 as u64]);
    let (_, ledger) = run_dot_product(x, y, &params, run_seed)?;
    let jitter_seed = derive(workload_seed, &[NET_TAG, state.0 as u64]);
    let time_ms = compute.compute_time(&params) + network.network_time(&ledger, jitter_seed);
    Ok(ExecutionMetrics {
        time_ms,
        bytes: ledger.total_bytes,
        messages: ledger.total_messages,
        rounds: ledger.sequential_rounds,
        security_score: security_score(&params),
    })
}
