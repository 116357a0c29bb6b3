use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use smpctune_core::agent::{self, QTable};
use smpctune_core::environment::Action;

use super::{ensure_out_dir, write_file};
use crate::config::ExperimentConfig;
use crate::error::Result;

#[derive(Serialize)]
struct QTableDump {
    seed: u64,
    states: usize,
    actions: usize,
    /// Row-major: `values[s * actions + a]`.
    values: Vec<f64>,
}

fn dump_table(seed: u64, q: &QTable) -> QTableDump {
    let values = (0..q.states())
        .flat_map(|s| q.row(smpctune_core::environment::StateId(s)).to_vec())
        .collect();
    QTableDump {
        seed,
        states: q.states(),
        actions: Action::COUNT,
        values,
    }
}

/// Trains one learner per seed; writes train.csv (one row per episode per
/// seed) and qtable.json (final tables, full float precision).
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let env = cfg.build_env()?;
    let hp = cfg.hyperparams();

    let mut csv = String::from("seed,episode,epsilon,alpha,cum_reward,final_state\n");
    let mut dumps = Vec::new();
    for seed in cfg.sorted_seeds() {
        let (q, trace) = agent::train(&env, &hp, seed)?;
        for rec in &trace.records {
            writeln!(
                csv,
                "{},{},{},{},{},{}",
                seed, rec.episode, rec.epsilon, rec.alpha, rec.cum_reward, rec.final_state.0
            )
            .unwrap();
        }
        dumps.push(dump_table(seed, &q));
    }

    let json = serde_json::to_string(&dumps)
        .map_err(|e| crate::error::CliError::Runtime(e.to_string()))?
        + "\n";

    let dir = ensure_out_dir(cfg)?;
    let csv_path = dir.join("train.csv");
    let json_path = dir.join("qtable.json");
    write_file(&csv_path, &csv)?;
    write_file(&json_path, &json)?;
    Ok(vec![csv_path, json_path])
}
