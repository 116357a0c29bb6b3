//! Reference optimizers the learned policy is measured against.
//!
//! Grid search is the ground-truth oracle: it prices every state once and
//! its argmax defines zero regret. Random search is the budget-matched
//! straw man. Value iteration solves the MDP exactly and provides the
//! target table for convergence checks on the learner.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::agent::{InitMode, QTable};
use crate::environment::{Action, Environment, StateId};
use crate::seed::rng_from;
use crate::{Error, Result};

/// Output of the exhaustive sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Maximizer; reward ties resolve to the lowest state id.
    pub argmax_state: StateId,
    pub best_reward: f64,
    /// Reward per state, indexed by flattened id.
    pub rewards: Vec<f64>,
    pub evaluations: u64,
    /// Total modeled protocol time the sweep consumed.
    pub eval_time_ms: f64,
}

/// Evaluates every grid state exactly once.
pub fn grid_search(env: &Environment) -> Result<OracleResult> {
    let mut rewards = Vec::with_capacity(env.grid().len());
    let mut eval_time_ms = 0.0;
    let mut argmax_state = StateId(0);
    let mut best_reward = f64::NEG_INFINITY;
    for state in env.states() {
        let (reward, metrics) = env.evaluate(state)?;
        if reward > best_reward {
            best_reward = reward;
            argmax_state = state;
        }
        rewards.push(reward);
        eval_time_ms += metrics.time_ms;
    }
    Ok(OracleResult {
        argmax_state,
        best_reward,
        rewards,
        evaluations: env.grid().len() as u64,
        eval_time_ms,
    })
}

/// Best state found by a budgeted random probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchResult {
    pub best_state: StateId,
    pub best_reward: f64,
    pub evaluations: u64,
    pub eval_time_ms: f64,
}

/// Samples `budget` states uniformly and keeps the best seen.
///
/// With replacement the same state may be probed repeatedly (the classic
/// baseline); without replacement the probe order is a seeded shuffle and
/// a budget of at least the grid size degenerates to exhaustive coverage.
pub fn random_search(
    env: &Environment,
    budget: usize,
    seed: u64,
    with_replacement: bool,
) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::InvalidUsage(
            "random search needs a budget of at least 1".into(),
        ));
    }
    let mut rng = rng_from(seed);
    let len = env.grid().len();
    let picks: Vec<StateId> = if with_replacement {
        (0..budget).map(|_| StateId(rng.gen_range(0..len))).collect()
    } else {
        let mut ids: Vec<StateId> = env.states().collect();
        ids.shuffle(&mut rng);
        ids.truncate(budget.min(len));
        ids
    };

    let mut best_state = picks[0];
    let mut best_reward = f64::NEG_INFINITY;
    let mut eval_time_ms = 0.0;
    for &state in &picks {
        let (reward, metrics) = env.evaluate(state)?;
        if reward > best_reward {
            best_reward = reward;
            best_state = state;
        }
        eval_time_ms += metrics.time_ms;
    }
    Ok(SearchResult {
        best_state,
        best_reward,
        evaluations: picks.len() as u64,
        eval_time_ms,
    })
}

/// Solves `Q*(s, a) = r(s, a) + gamma * max_a' Q*(s', a')` by fixed-point
/// iteration to sup-norm tolerance `tol`.
///
/// Transitions and rewards are deterministic, so the Bellman operator is a
/// `gamma`-contraction and the returned table's residual is below `tol` at
/// every entry.
pub fn value_iteration(env: &Environment, gamma: f64, tol: f64) -> Result<QTable> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidConfig(format!(
            "gamma must be in [0, 1), got {gamma}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tol must be > 0, got {tol}")));
    }

    let states = env.grid().len();
    let mut next = vec![[StateId(0); Action::COUNT]; states];
    let mut reward = vec![[0.0f64; Action::COUNT]; states];
    for s in env.states() {
        for a in Action::ALL {
            let n = env.transition(s, a)?;
            next[s.0][a.index()] = n;
            reward[s.0][a.index()] = env.evaluate(n)?.0;
        }
    }

    // A contraction with factor gamma needs ~log(tol)/log(gamma) sweeps;
    // the cap only guards against a pathological gamma right below 1.
    let max_sweeps = 10_000_000usize;
    let mut q = vec![0.0f64; states * Action::COUNT];
    let mut fresh = vec![0.0f64; states * Action::COUNT];
    for _ in 0..max_sweeps {
        let mut delta = 0.0f64;
        for s in 0..states {
            for a in 0..Action::COUNT {
                let n = next[s][a].0;
                let max_next = q[n * Action::COUNT..(n + 1) * Action::COUNT]
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max);
                let v = reward[s][a] + gamma * max_next;
                delta = delta.max((v - q[s * Action::COUNT + a]).abs());
                fresh[s * Action::COUNT + a] = v;
            }
        }
        std::mem::swap(&mut q, &mut fresh);
        if delta < tol {
            let mut table = QTable::init(states, InitMode::Zeros, 0);
            for s in (0..states).map(StateId) {
                for a in Action::ALL {
                    table.set_q(s, a, q[s.0 * Action::COUNT + a.index()]);
                }
            }
            return Ok(table);
        }
    }
    Err(Error::Protocol(format!(
        "value iteration did not converge within {max_sweeps} sweeps"
    )))
}
