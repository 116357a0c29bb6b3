//! Flat TOML experiment configuration.
//!
//! Every key maps one-to-one onto a field of the core types; an empty file
//! (or no file at all) yields the defaults. Unknown keys are rejected and
//! every value is range-checked at load time with the key named in the
//! error.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use smpctune_core::agent::{DriftPoint, Hyperparams, InitMode, Policy};
use smpctune_core::costmodel::{ComputeModel, NetworkModel};
use smpctune_core::environment::{Environment, ParamGrid, RewardWeights};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    // Parameter grid and protocol workload.
    pub rounds_axis: Vec<usize>,
    pub block_axis: Vec<usize>,
    pub sec_axis: Vec<u32>,
    pub parties: usize,
    pub workload_len: usize,
    pub workload_seed: u64,

    // Network cost model.
    pub latency_ms: f64,
    pub bandwidth_bpms: f64,
    pub jitter_pct: f64,

    // Compute cost model.
    pub c_share: f64,
    pub c_mul: f64,
    pub c_check: f64,

    // Reward weights; t_ref/c_ref override the reference-state normalizers.
    pub w_t: f64,
    pub w_c: f64,
    pub w_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_ref: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_ref: Option<f64>,

    // Learner hyperparameters.
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

    // Baseline budgets and tolerances.
    pub random_budget: usize,
    pub random_with_replacement: bool,
    pub vi_tol: f64,

    // Larger grid used by the compare command's scalability row.
    pub scale_rounds_axis: Vec<usize>,
    pub scale_block_axis: Vec<usize>,
    pub scale_sec_axis: Vec<u32>,

    // Orchestration.
    pub seeds: Vec<u64>,
    pub out_dir: String,

    // Drift schedule: at episode drift_episodes[i] the network latency
    // becomes drift_latency_ms[i]. Both arrays must have the same length.
    pub drift_episodes: Vec<usize>,
    pub drift_latency_ms: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let grid = ParamGrid::default();
        let network = NetworkModel::default();
        let compute = ComputeModel::default();
        let weights = RewardWeights::default();
        let hp = Hyperparams::default();
        ExperimentConfig {
            rounds_axis: grid.rounds_axis,
            block_axis: grid.block_axis,
            sec_axis: grid.sec_axis,
            parties: grid.parties,
            workload_len: grid.workload_len,
            workload_seed: 7,
            latency_ms: network.latency_ms,
            bandwidth_bpms: network.bandwidth_bpms,
            jitter_pct: network.jitter_pct,
            c_share: compute.c_share,
            c_mul: compute.c_mul,
            c_check: compute.c_check,
            w_t: weights.w_t,
            w_c: weights.w_c,
            w_s: weights.w_s,
            t_ref: None,
            c_ref: None,
            alpha0: hp.alpha0,
            alpha_decay: hp.alpha_decay,
            gamma: hp.gamma,
            eps0: hp.eps0,
            eps_decay: hp.eps_decay,
            eps_min: hp.eps_min,
            tau: hp.tau,
            episodes: hp.episodes,
            horizon: hp.horizon,
            policy: hp.policy,
            q_init: hp.q_init,
            random_budget: 200,
            random_with_replacement: true,
            vi_tol: 1e-10,
            scale_rounds_axis: (1..=20).collect(),
            scale_block_axis: vec![1, 2, 4, 8, 16],
            scale_sec_axis: vec![32, 64, 128],
            seeds: vec![1, 2, 3, 4, 5],
            out_dir: "out".into(),
            drift_episodes: Vec::new(),
            drift_latency_ms: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    /// Serializes with every key present (overrides excepted) in a fixed
    /// order, so `dump(load(x))` is the canonical form of `x`.
    pub fn to_canonical_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Runtime(e.to_string()))
    }

    pub fn grid(&self) -> ParamGrid {
        ParamGrid {
            rounds_axis: self.rounds_axis.clone(),
            block_axis: self.block_axis.clone(),
            sec_axis: self.sec_axis.clone(),
            parties: self.parties,
            workload_len: self.workload_len,
        }
    }

    pub fn scale_grid(&self) -> ParamGrid {
        ParamGrid {
            rounds_axis: self.scale_rounds_axis.clone(),
            block_axis: self.scale_block_axis.clone(),
            sec_axis: self.scale_sec_axis.clone(),
            parties: self.parties,
            workload_len: self.workload_len,
        }
    }

    pub fn network(&self) -> NetworkModel {
        NetworkModel {
            latency_ms: self.latency_ms,
            bandwidth_bpms: self.bandwidth_bpms,
            jitter_pct: self.jitter_pct,
        }
    }

    pub fn compute(&self) -> ComputeModel {
        ComputeModel {
            c_share: self.c_share,
            c_mul: self.c_mul,
            c_check: self.c_check,
        }
    }

    pub fn weights(&self) -> RewardWeights {
        RewardWeights {
            w_t: self.w_t,
            w_c: self.w_c,
            w_s: self.w_s,
        }
    }

    pub fn hyperparams(&self) -> Hyperparams {
        Hyperparams {
            alpha0: self.alpha0,
            alpha_decay: self.alpha_decay,
            gamma: self.gamma,
            eps0: self.eps0,
            eps_decay: self.eps_decay,
            eps_min: self.eps_min,
            tau: self.tau,
            episodes: self.episodes,
            horizon: self.horizon,
            policy: self.policy,
            q_init: self.q_init,
        }
    }

    fn normalizers(&self) -> Result<Option<(f64, f64)>> {
        match (self.t_ref, self.c_ref) {
            (None, None) => Ok(None),
            (Some(t), Some(c)) => Ok(Some((t, c))),
            _ => Err(CliError::Config(
                "t_ref and c_ref must be set together".into(),
            )),
        }
    }

    pub fn drift_schedule(&self) -> Result<Vec<DriftPoint>> {
        if self.drift_episodes.len() != self.drift_latency_ms.len() {
            return Err(CliError::Config(format!(
                "drift_episodes ({}) and drift_latency_ms ({}) must have equal lengths",
                self.drift_episodes.len(),
                self.drift_latency_ms.len()
            )));
        }
        Ok(self
            .drift_episodes
            .iter()
            .zip(&self.drift_latency_ms)
            .map(|(&episode, &latency_ms)| DriftPoint {
                episode,
                network: NetworkModel {
                    latency_ms,
                    ..self.network()
                },
            })
            .collect())
    }

    pub fn build_env(&self) -> Result<Environment> {
        Environment::new(
            self.grid(),
            self.network(),
            self.compute(),
            self.weights(),
            self.normalizers()?,
            self.workload_seed,
        )
        .map_err(Into::into)
    }

    pub fn build_scale_env(&self) -> Result<Environment> {
        Environment::new(
            self.scale_grid(),
            self.network(),
            self.compute(),
            self.weights(),
            self.normalizers()?,
            self.workload_seed,
        )
        .map_err(Into::into)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid().validate()?;
        self.scale_grid()
            .validate()
            .map_err(|e| CliError::Config(format!("scale_*_axis: {e}")))?;
        self.network().validate()?;
        self.compute().validate()?;
        self.weights().validate()?;
        self.hyperparams().validate()?;
        for (key, v) in [("t_ref", self.t_ref), ("c_ref", self.c_ref)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(CliError::Config(format!("{key} must be > 0, got {v}")));
                }
            }
        }
        self.normalizers()?;
        if self.seeds.is_empty() {
            return Err(CliError::Config("seeds must not be empty".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::Config("seeds must be distinct".into()));
        }
        if self.random_budget == 0 {
            return Err(CliError::Config("random_budget must be >= 1".into()));
        }
        if !(self.vi_tol > 0.0) {
            return Err(CliError::Config(format!(
                "vi_tol must be > 0, got {}",
                self.vi_tol
            )));
        }
        self.drift_schedule()?;
        for &latency in &self.drift_latency_ms {
            if !(latency > 0.0) {
                return Err(CliError::Config(format!(
                    "drift_latency_ms entries must be > 0, got {latency}"
                )));
            }
        }
        Ok(())
    }

    /// Seed list in emission order (ascending).
    pub fn sorted_seeds(&self) -> Vec<u64> {
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds
    }
}
