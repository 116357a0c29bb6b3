//! Tabular Q-learning over the parameter grid.
//!
//! The update rule is the classic weighted average
//!
//! ```text
//! Q(s, a) <- (1 - alpha) * Q(s, a) + alpha * (r + gamma * max_a' Q(s', a'))
//! ```
//!
//! with per-episode schedules `alpha_e = alpha0 / (1 + e * alpha_decay)`
//! and `eps_e = max(eps_min, eps0 * exp(-e * eps_decay))`. Exploration is
//! epsilon-greedy or softmax; every tie is broken toward the lowest action
//! ordinal so runs are reproducible. One master seed derives the Q-table
//! initializer and an independent substream per episode index, which makes
//! traces immune to episode reordering.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::costmodel::NetworkModel;
use crate::environment::{Action, Environment, StateId};
use crate::seed::{derive, rng_from};
use crate::{Error, Result};

const INIT_TAG: u64 = 0x696e_6974;
const EPISODE_TAG: u64 = 0x6570_6973;

/// How a fresh Q-table is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    Zeros,
    Random,
}

/// Exploration strategy used during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    EpsGreedy,
    Softmax,
}

/// Dense `|states| x |actions|` table of action values.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    states: usize,
    values: Vec<f64>,
    init_mode: InitMode,
}

impl QTable {
    /// `zeros` starts at exactly 0; `random` draws uniformly from
    /// `[-0.01, 0.01]` using the given seed.
    pub fn init(states: usize, mode: InitMode, seed: u64) -> QTable {
        let len = states * Action::COUNT;
        let values = match mode {
            InitMode::Zeros => vec![0.0; len],
            InitMode::Random => {
                let mut rng = rng_from(seed);
                (0..len).map(|_| rng.gen_range(-0.01..=0.01)).collect()
            }
        };
        QTable {
            states,
            values,
            init_mode: mode,
        }
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn init_mode(&self) -> InitMode {
        self.init_mode
    }

    fn idx(&self, state: StateId, action: Action) -> usize {
        assert!(state.0 < self.states, "state {state} outside the Q-table");
        state.0 * Action::COUNT + action.index()
    }

    pub fn q(&self, state: StateId, action: Action) -> f64 {
        self.values[self.idx(state, action)]
    }

    pub fn set_q(&mut self, state: StateId, action: Action, value: f64) {
        let i = self.idx(state, action);
        self.values[i] = value;
    }

    pub fn row(&self, state: StateId) -> &[f64] {
        let base = self.idx(state, Action::IncRounds);
        &self.values[base..base + Action::COUNT]
    }

    pub fn max_q(&self, state: StateId) -> f64 {
        self.row(state).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Greedy action; equal values resolve to the lowest ordinal.
    pub fn argmax_action(&self, state: StateId) -> Action {
        let row = self.row(state);
        let mut best = 0;
        for (i, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = i;
            }
        }
        Action::from_index(best).expect("row length matches the action count")
    }

    /// State the table currently ranks highest by `max_a Q(s, a)`; ties
    /// resolve to the lowest state id.
    pub fn best_state(&self) -> StateId {
        let mut best = StateId(0);
        let mut best_v = self.max_q(best);
        for s in (1..self.states).map(StateId) {
            let v = self.max_q(s);
            if v > best_v {
                best = s;
                best_v = v;
            }
        }
        best
    }

    /// Largest absolute entry difference between two tables of equal shape.
    pub fn linf_distance(&self, other: &QTable) -> f64 {
        assert_eq!(self.states, other.states, "comparing unequal tables");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// One Bellman backup on a single entry; returns the new value.
    ///
    /// Panics on a non-finite reward: that always indicates a broken reward
    /// configuration upstream, and silently folding NaN into the table
    /// would poison every later update.
    pub fn q_update(
        &mut self,
        state: StateId,
        action: Action,
        reward: f64,
        next_state: StateId,
        alpha: f64,
        gamma: f64,
    ) -> f64 {
        assert!(
            reward.is_finite(),
            "non-finite reward {reward} in a Q-update at state {state}"
        );
        let target = reward + gamma * self.max_q(next_state);
        let i = self.idx(state, action);
        let updated = (1.0 - alpha) * self.values[i] + alpha * target;
        self.values[i] = updated;
        updated
    }
}

/// All knobs of a training run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub alpha0: f64,
    pub alpha_decay: f64,
    pub gamma: f64,
    pub eps0: f64,
    pub eps_decay: f64,
    pub eps_min: f64,
    pub tau: f64,
    pub episodes: usize,
    pub horizon: usize,
    pub policy: Policy,
    pub q_init: InitMode,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            alpha0: 0.5,
            alpha_decay: 0.01,
            gamma: 0.9,
            eps0: 1.0,
            eps_decay: 0.01,
            eps_min: 0.05,
            tau: 1.0,
            episodes: 2000,
            horizon: 20,
            policy: Policy::EpsGreedy,
            q_init: InitMode::Zeros,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("alpha0", self.alpha0 > 0.0 && self.alpha0 <= 1.0),
            ("alpha_decay", self.alpha_decay >= 0.0),
            ("gamma", (0.0..1.0).contains(&self.gamma)),
            ("eps0", (0.0..=1.0).contains(&self.eps0)),
            ("eps_decay", self.eps_decay >= 0.0),
            ("eps_min", (0.0..=1.0).contains(&self.eps_min)),
            ("tau", self.tau > 0.0),
            ("horizon", self.horizon >= 1),
        ];
        for (key, ok) in checks {
            if !ok {
                return Err(Error::InvalidConfig(format!(
                    "hyperparameter {key} out of range"
                )));
            }
        }
        Ok(())
    }

    /// `alpha0 / (1 + e * alpha_decay)`.
    pub fn alpha(&self, episode: usize) -> f64 {
        self.alpha0 / (1.0 + episode as f64 * self.alpha_decay)
    }

    /// `max(eps_min, eps0 * exp(-e * eps_decay))`; never decays below the
    /// floor, so long continuous runs keep exploring.
    pub fn epsilon(&self, episode: usize) -> f64 {
        self.eps_min
            .max(self.eps0 * (-(episode as f64) * self.eps_decay).exp())
    }
}

/// With probability `epsilon` a uniform action, otherwise the greedy one.
pub fn select_eps_greedy(
    q: &QTable,
    state: StateId,
    epsilon: f64,
    rng: &mut impl Rng,
) -> Action {
    let u: f64 = rng.gen();
    if u < epsilon {
        Action::from_index(rng.gen_range(0..Action::COUNT)).expect("in range")
    } else {
        q.argmax_action(state)
    }
}

/// Boltzmann distribution over the state's row at temperature `tau`,
/// computed with max-subtraction so large values cannot overflow.
pub fn softmax_probs(q: &QTable, state: StateId, tau: f64) -> [f64; Action::COUNT] {
    let row = q.row(state);
    let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut probs = [0.0; Action::COUNT];
    let mut total = 0.0;
    for (p, &v) in probs.iter_mut().zip(row) {
        *p = ((v - m) / tau).exp();
        total += *p;
    }
    for p in &mut probs {
        *p /= total;
    }
    probs
}

pub fn select_softmax(q: &QTable, state: StateId, tau: f64, rng: &mut impl Rng) -> Action {
    let probs = softmax_probs(q, state, tau);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Action::from_index(i).expect("in range");
        }
    }
    // Cumulative rounding can leave u just above the final sum.
    Action::Stay
}

/// Per-episode training record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub cum_reward: f64,
    pub final_state: StateId,
    /// Where the greedy policy settles at the end of the episode: the
    /// rollout terminus starting from the best-rated state. A plain
    /// `argmax_s max_a Q(s, a)` would be misleading here, because with a
    /// zeros-initialized table and all-negative rewards the under-visited
    /// states keep optimistic values long into training.
    pub greedy_argmax: StateId,
}

/// A network-model switch applied before the given episode runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftPoint {
    pub episode: usize,
    pub network: NetworkModel,
}

/// Full history of one (possibly drifting) run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EpisodeTrace {
    pub records: Vec<EpisodeRecord>,
    pub drift_events: Vec<DriftPoint>,
    /// Total modeled protocol time consumed by every step's evaluation.
    pub eval_time_ms: f64,
    /// Number of environment steps taken.
    pub steps: u64,
}

/// Runs episodes `range` against `env`, mutating `q` and appending to
/// `trace`. Episode seeds derive from `(master_seed, episode index)` only.
/// The decay schedules are indexed relative to `schedule_origin`, so a
/// drift segment can restart them without disturbing the seed stream.
fn run_episodes(
    env: &Environment,
    hp: &Hyperparams,
    q: &mut QTable,
    trace: &mut EpisodeTrace,
    master_seed: u64,
    range: std::ops::Range<usize>,
    schedule_origin: usize,
) -> Result<()> {
    for episode in range {
        let mut rng = rng_from(derive(master_seed, &[EPISODE_TAG, episode as u64]));
        let epsilon = hp.epsilon(episode - schedule_origin);
        let alpha = hp.alpha(episode - schedule_origin);
        let mut state = env.reset(&mut rng);
        let mut cum_reward = 0.0;
        for _ in 0..hp.horizon {
            let action = match hp.policy {
                Policy::EpsGreedy => select_eps_greedy(q, state, epsilon, &mut rng),
                Policy::Softmax => select_softmax(q, state, hp.tau, &mut rng),
            };
            let outcome = env.step(state, action)?;
            q.q_update(state, action, outcome.reward, outcome.next_state, alpha, hp.gamma);
            cum_reward += outcome.reward;
            trace.eval_time_ms += outcome.metrics.time_ms;
            trace.steps += 1;
            state = outcome.next_state;
        }
        let greedy_argmax = *greedy_rollout(q, env, q.best_state(), env.grid().len())?
            .last()
            .expect("rollout always contains its start");
        trace.records.push(EpisodeRecord {
            episode,
            epsilon,
            alpha,
            cum_reward,
            final_state: state,
            greedy_argmax,
        });
    }
    Ok(())
}

/// Standard episodic training with a fixed environment.
pub fn train(env: &Environment, hp: &Hyperparams, master_seed: u64) -> Result<(QTable, EpisodeTrace)> {
    hp.validate()?;
    let mut q = QTable::init(env.grid().len(), hp.q_init, derive(master_seed, &[INIT_TAG]));
    let mut trace = EpisodeTrace::default();
    run_episodes(env, hp, &mut q, &mut trace, master_seed, 0..hp.episodes, 0)?;
    Ok((q, trace))
}

/// Same loop as [`train`], but the network model is swapped (and the
/// environment's evaluation cache rebuilt) at each drift point. Each drift
/// is a known change point, so the alpha and epsilon decay schedules
/// restart there: the segment re-learns at full rate instead of limping on
/// a nearly-frozen table, and epsilon keeps its floor forever either way.
/// With an empty schedule this is bit-for-bit identical to [`train`].
pub fn continuous_run(
    env: &mut Environment,
    hp: &Hyperparams,
    master_seed: u64,
    drift_schedule: &[DriftPoint],
) -> Result<(QTable, EpisodeTrace)> {
    hp.validate()?;
    for w in drift_schedule.windows(2) {
        if w[1].episode <= w[0].episode {
            return Err(Error::InvalidConfig(format!(
                "drift points must be strictly increasing, got episode {} after {}",
                w[1].episode, w[0].episode
            )));
        }
    }
    if let Some(last) = drift_schedule.last() {
        if last.episode >= hp.episodes {
            return Err(Error::InvalidConfig(format!(
                "drift point at episode {} is outside a {}-episode run",
                last.episode, hp.episodes
            )));
        }
    }

    let mut q = QTable::init(env.grid().len(), hp.q_init, derive(master_seed, &[INIT_TAG]));
    let mut trace = EpisodeTrace::default();
    let mut done = 0usize;
    for point in drift_schedule {
        run_episodes(env, hp, &mut q, &mut trace, master_seed, done..point.episode, done)?;
        env.set_network_model(point.network)?;
        trace.drift_events.push(*point);
        done = point.episode;
    }
    run_episodes(env, hp, &mut q, &mut trace, master_seed, done..hp.episodes, done)?;
    Ok((q, trace))
}

/// Follows the greedy policy from `start` until it reaches a fixed point
/// (`Stay` chosen, or a clamped move that goes nowhere), a 2-cycle closes,
/// or `max_steps` transitions have been taken. Returns the visited states,
/// starting with `start`.
pub fn greedy_rollout(
    q: &QTable,
    env: &Environment,
    start: StateId,
    max_steps: usize,
) -> Result<Vec<StateId>> {
    let mut visited = vec![start];
    let mut prev: Option<StateId> = None;
    let mut current = start;
    for _ in 0..max_steps {
        let action = q.argmax_action(current);
        if action == Action::Stay {
            break;
        }
        let next = env.transition(current, action)?;
        if next == current || Some(next) == prev {
            break;
        }
        visited.push(next);
        prev = Some(current);
        current = next;
    }
    Ok(visited)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::ComputeModel;
    use crate::environment::{ParamGrid, RewardWeights};
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn tiny_env() -> Environment {
        // 2 x 2 x 3 = 12 cheap states.
        Environment::new(
            ParamGrid {
                rounds_axis: vec![1, 2],
                block_axis: vec![1, 2],
                sec_axis: vec![32, 64, 128],
                parties: 2,
                workload_len: 4,
            },
            NetworkModel::default(),
            ComputeModel::default(),
            RewardWeights::default(),
            None,
            3,
        )
        .unwrap()
    }

    fn chain_env() -> Environment {
        // 1 x 4 x 1: a single block axis, so IncBlock walks a chain.
        Environment::new(
            ParamGrid {
                rounds_axis: vec![1],
                block_axis: vec![1, 2, 4, 8],
                sec_axis: vec![32],
                parties: 2,
                workload_len: 4,
            },
            NetworkModel::default(),
            ComputeModel::default(),
            RewardWeights::default(),
            None,
            3,
        )
        .unwrap()
    }

    #[test]
    fn init_zeros_and_random_behave_as_documented() {
        let z = QTable::init(5, InitMode::Zeros, 1);
        assert!(z.row(StateId(3)).iter().all(|&v| v == 0.0));
        assert_eq!(z.init_mode(), InitMode::Zeros);

        let r1 = QTable::init(5, InitMode::Random, 1);
        let r2 = QTable::init(5, InitMode::Random, 1);
        let r3 = QTable::init(5, InitMode::Random, 2);
        assert_eq!(r1, r2);
        assert_ne!(r1, r3);
        for s in (0..5).map(StateId) {
            for &v in r1.row(s) {
                assert!((-0.01..=0.01).contains(&v));
            }
        }
    }

    #[test]
    fn argmax_breaks_ties_toward_the_lowest_ordinal() {
        let mut q = QTable::init(2, InitMode::Zeros, 0);
        // All equal: first action wins.
        assert_eq!(q.argmax_action(StateId(0)), Action::IncRounds);
        q.set_q(StateId(0), Action::DecBlock, 1.0);
        q.set_q(StateId(0), Action::Stay, 1.0);
        assert_eq!(q.argmax_action(StateId(0)), Action::DecBlock);
    }

    #[test]
    fn eps_greedy_at_zero_is_pure_argmax() {
        let mut q = QTable::init(3, InitMode::Zeros, 0);
        q.set_q(StateId(1), Action::IncSec, 2.0);
        let mut rng = rng_from(4);
        for _ in 0..200 {
            assert_eq!(
                select_eps_greedy(&q, StateId(1), 0.0, &mut rng),
                Action::IncSec
            );
            assert_eq!(
                select_eps_greedy(&q, StateId(0), 0.0, &mut rng),
                Action::IncRounds
            );
        }
    }

    #[test]
    fn eps_greedy_at_one_is_uniform() {
        let q = QTable::init(1, InitMode::Zeros, 0);
        let mut rng = rng_from(0x5eed);
        let mut counts = [0u64; Action::COUNT];
        let draws = 10_000;
        for _ in 0..draws {
            counts[select_eps_greedy(&q, StateId(0), 1.0, &mut rng).index()] += 1;
        }
        let expected = draws as f64 / Action::COUNT as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        let crit = ChiSquared::new((Action::COUNT - 1) as f64)
            .unwrap()
            .inverse_cdf(0.99);
        assert!(chi2 < crit, "chi2 {chi2} >= {crit}");
    }

    #[test]
    fn softmax_matches_the_worked_single_peak_case() {
        let mut q = QTable::init(1, InitMode::Zeros, 0);
        q.set_q(StateId(0), Action::IncRounds, 1.0);
        let p = softmax_probs(&q, StateId(0), 1.0);
        let e = std::f64::consts::E;
        assert!((p[0] - e / (e + 6.0)).abs() < 1e-12);
        for &pi in &p[1..] {
            assert!((pi - 1.0 / (e + 6.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_probabilities_sum_to_one_and_order_by_value() {
        let q = QTable::init(40, InitMode::Random, 9);
        for s in (0..40).map(StateId) {
            let p = softmax_probs(&q, s, 0.37);
            let total: f64 = p.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            let row = q.row(s);
            for i in 0..Action::COUNT {
                for j in 0..Action::COUNT {
                    if row[i] > row[j] {
                        assert!(p[i] > p[j]);
                    }
                }
            }
        }
    }

    #[test]
    fn softmax_with_equal_values_is_uniform_and_low_tau_is_greedy() {
        let q = QTable::init(1, InitMode::Zeros, 0);
        for p in softmax_probs(&q, StateId(0), 1.0) {
            assert!((p - 1.0 / 7.0).abs() < 1e-15);
        }
        let mut q = QTable::init(1, InitMode::Zeros, 0);
        q.set_q(StateId(0), Action::DecSec, 0.5);
        let mut rng = rng_from(1);
        for _ in 0..100 {
            assert_eq!(select_softmax(&q, StateId(0), 1e-3, &mut rng), Action::DecSec);
        }
    }

    #[test]
    fn q_update_reproduces_worked_examples() {
        let mut q = QTable::init(2, InitMode::Zeros, 0);
        let v = q.q_update(StateId(0), Action::Stay, 1.0, StateId(1), 0.5, 0.9);
        assert_eq!(v, 0.5);

        let mut q = QTable::init(2, InitMode::Zeros, 0);
        q.set_q(StateId(0), Action::IncBlock, 2.0);
        q.set_q(StateId(1), Action::DecSec, 3.0);
        let v = q.q_update(StateId(0), Action::IncBlock, 1.0, StateId(1), 0.1, 0.9);
        assert!((v - 2.17).abs() < 1e-12, "{v}");
        assert!((q.q(StateId(0), Action::IncBlock) - 2.17).abs() < 1e-12);
    }

    #[test]
    fn q_update_leaves_fixed_points_unchanged() {
        let mut q = QTable::init(2, InitMode::Zeros, 0);
        q.set_q(StateId(1), Action::IncRounds, 1.5);
        // Target = 2.0 + 0.9 * 1.5 = 3.35; plant exactly that.
        q.set_q(StateId(0), Action::Stay, 2.0 + 0.9 * 1.5);
        let before = q.q(StateId(0), Action::Stay);
        let after = q.q_update(StateId(0), Action::Stay, 2.0, StateId(1), 0.7, 0.9);
        assert!((after - before).abs() < 1e-12);
    }

    #[test]
    fn q_update_touches_exactly_one_entry() {
        let mut q = QTable::init(3, InitMode::Random, 8);
        let snapshot = q.clone();
        q.q_update(StateId(1), Action::IncSec, -0.5, StateId(2), 0.3, 0.9);
        for s in (0..3).map(StateId) {
            for a in Action::ALL {
                if (s, a) != (StateId(1), Action::IncSec) {
                    assert_eq!(q.q(s, a), snapshot.q(s, a));
                }
            }
        }
    }

    #[test]
    #[should_panic(expected = "non-finite reward")]
    fn q_update_rejects_non_finite_rewards() {
        let mut q = QTable::init(1, InitMode::Zeros, 0);
        q.q_update(StateId(0), Action::Stay, f64::NAN, StateId(0), 0.5, 0.9);
    }

    #[test]
    fn schedules_decay_as_specified() {
        let hp = Hyperparams::default();
        assert_eq!(hp.alpha(0), 0.5);
        assert!((hp.alpha(100) - 0.25).abs() < 1e-15);
        assert_eq!(hp.epsilon(0), 1.0);
        let e = (-0.01f64 * 10.0).exp();
        assert!((hp.epsilon(10) - e).abs() < 1e-15);
        // The floor holds forever.
        assert_eq!(hp.epsilon(100_000), hp.eps_min);
    }

    #[test]
    fn hyperparams_validation_rejects_out_of_range_values() {
        for bad in [
            Hyperparams {
                alpha0: 0.0,
                ..Hyperparams::default()
            },
            Hyperparams {
                gamma: 1.0,
                ..Hyperparams::default()
            },
            Hyperparams {
                eps0: 1.5,
                ..Hyperparams::default()
            },
            Hyperparams {
                tau: 0.0,
                ..Hyperparams::default()
            },
            Hyperparams {
                horizon: 0,
                ..Hyperparams::default()
            },
            Hyperparams {
                eps_decay: -0.1,
                ..Hyperparams::default()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
        assert!(Hyperparams::default().validate().is_ok());
    }

    #[test]
    fn zero_episode_training_returns_the_initial_table() {
        let env = tiny_env();
        for mode in [InitMode::Zeros, InitMode::Random] {
            let hp = Hyperparams {
                episodes: 0,
                q_init: mode,
                ..Hyperparams::default()
            };
            let (q, trace) = train(&env, &hp, 123).unwrap();
            assert_eq!(q, QTable::init(12, mode, derive(123, &[INIT_TAG])));
            assert!(trace.records.is_empty());
            assert_eq!(trace.steps, 0);
        }
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let env = tiny_env();
        let hp = Hyperparams {
            episodes: 50,
            ..Hyperparams::default()
        };
        let (q1, t1) = train(&env, &hp, 42).unwrap();
        let (q2, t2) = train(&env, &hp, 42).unwrap();
        assert_eq!(q1, q2);
        assert_eq!(t1, t2);
        let (q3, _) = train(&env, &hp, 43).unwrap();
        assert_ne!(q1, q3);
    }

    #[test]
    fn trace_records_schedules_and_counts() {
        let env = tiny_env();
        let hp = Hyperparams {
            episodes: 30,
            horizon: 5,
            ..Hyperparams::default()
        };
        let (_, trace) = train(&env, &hp, 7).unwrap();
        assert_eq!(trace.records.len(), 30);
        assert_eq!(trace.steps, 150);
        assert!(trace.eval_time_ms > 0.0);
        for (e, rec) in trace.records.iter().enumerate() {
            assert_eq!(rec.episode, e);
            assert_eq!(rec.epsilon, hp.epsilon(e));
            assert_eq!(rec.alpha, hp.alpha(e));
            assert!(rec.cum_reward.is_finite());
            assert!(rec.final_state.0 < 12);
            assert!(rec.greedy_argmax.0 < 12);
        }
    }

    #[test]
    fn softmax_policy_trains_deterministically_too() {
        let env = tiny_env();
        let hp = Hyperparams {
            episodes: 20,
            policy: Policy::Softmax,
            ..Hyperparams::default()
        };
        let (q1, _) = train(&env, &hp, 5).unwrap();
        let (q2, _) = train(&env, &hp, 5).unwrap();
        assert_eq!(q1, q2);
    }

    #[test]
    fn greedy_rollout_follows_the_table_and_stops_at_stay() {
        let env = chain_env();
        let mut q = QTable::init(4, InitMode::Zeros, 0);
        q.set_q(StateId(0), Action::IncBlock, 1.0);
        q.set_q(StateId(1), Action::IncBlock, 1.0);
        q.set_q(StateId(2), Action::Stay, 1.0);
        let path = greedy_rollout(&q, &env, StateId(0), 10).unwrap();
        assert_eq!(path, vec![StateId(0), StateId(1), StateId(2)]);
        // Zero budget: only the start.
        assert_eq!(
            greedy_rollout(&q, &env, StateId(0), 0).unwrap(),
            vec![StateId(0)]
        );
    }

    #[test]
    fn greedy_rollout_detects_walls_and_two_cycles() {
        let env = chain_env();
        // A clamped move is a fixed point.
        let mut q = QTable::init(4, InitMode::Zeros, 0);
        q.set_q(StateId(0), Action::DecBlock, 1.0);
        assert_eq!(
            greedy_rollout(&q, &env, StateId(0), 10).unwrap(),
            vec![StateId(0)]
        );
        // 0 -> 1 -> 0 closes a 2-cycle and terminates.
        let mut q = QTable::init(4, InitMode::Zeros, 0);
        q.set_q(StateId(0), Action::IncBlock, 1.0);
        q.set_q(StateId(1), Action::DecBlock, 1.0);
        let path = greedy_rollout(&q, &env, StateId(0), 10).unwrap();
        assert_eq!(path, vec![StateId(0), StateId(1)]);
    }

    #[test]
    fn continuous_run_without_drift_matches_train() {
        let mut env = tiny_env();
        let hp = Hyperparams {
            episodes: 40,
            ..Hyperparams::default()
        };
        let (q_train, t_train) = train(&env, &hp, 11).unwrap();
        let (q_cont, t_cont) = continuous_run(&mut env, &hp, 11, &[]).unwrap();
        assert_eq!(q_train, q_cont);
        assert_eq!(t_train, t_cont);
    }

    #[test]
    fn continuous_run_applies_drift_and_records_it() {
        let mut env = tiny_env();
        let hp = Hyperparams {
            episodes: 20,
            ..Hyperparams::default()
        };
        let doubled = NetworkModel {
            latency_ms: 2.0,
            ..NetworkModel::default()
        };
        let schedule = [DriftPoint {
            episode: 10,
            network: doubled,
        }];
        let (_, trace) = continuous_run(&mut env, &hp, 11, &schedule).unwrap();
        assert_eq!(trace.drift_events, schedule.to_vec());
        assert_eq!(trace.records.len(), 20);
        assert_eq!(env.network().latency_ms, 2.0);
        // The decay schedules restart at the drift point.
        assert_eq!(trace.records[10].epsilon, hp.epsilon(0));
        assert_eq!(trace.records[10].alpha, hp.alpha(0));
        assert_eq!(trace.records[13].epsilon, hp.epsilon(3));
        assert!(trace.records[9].epsilon < trace.records[10].epsilon);
    }

    #[test]
    fn continuous_run_rejects_bad_schedules() {
        let hp = Hyperparams {
            episodes: 20,
            ..Hyperparams::default()
        };
        let net = NetworkModel::default();
        let dup = [
            DriftPoint {
                episode: 5,
                network: net,
            },
            DriftPoint {
                episode: 5,
                network: net,
            },
        ];
        assert!(matches!(
            continuous_run(&mut tiny_env(), &hp, 1, &dup),
            Err(Error::InvalidConfig(_))
        ));
        let late = [DriftPoint {
            episode: 20,
            network: net,
        }];
        assert!(continuous_run(&mut tiny_env(), &hp, 1, &late).is_err());
    }
}
