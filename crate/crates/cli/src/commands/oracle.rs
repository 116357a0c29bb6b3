use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use smpctune_core::baselines;

use super::{ensure_out_dir, write_file};
use crate::config::ExperimentConfig;
use crate::error::Result;

#[derive(Serialize)]
struct OracleSummary {
    argmax_state: usize,
    best_reward: f64,
    evaluations: u64,
}

/// Prices every grid state and writes oracle.csv plus a one-line JSON
/// summary carrying the argmax.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let env = cfg.build_env()?;
    let oracle = baselines::grid_search(&env)?;

    let mut csv =
        String::from("state_id,rounds,block,secbits,reward,time_ms,bytes,security_score\n");
    for state in env.states() {
        let (i_rounds, i_block, i_sec) = env.grid().coords(state)?;
        let (reward, metrics) = env.evaluate(state)?;
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            state.0,
            env.grid().rounds_axis[i_rounds],
            env.grid().block_axis[i_block],
            env.grid().sec_axis[i_sec],
            reward,
            metrics.time_ms,
            metrics.bytes,
            metrics.security_score
        )
        .unwrap();
    }

    let summary = OracleSummary {
        argmax_state: oracle.argmax_state.0,
        best_reward: oracle.best_reward,
        evaluations: oracle.evaluations,
    };
    let json = serde_json::to_string(&summary)
        .map_err(|e| crate::error::CliError::Runtime(e.to_string()))?
        + "\n";

    let dir = ensure_out_dir(cfg)?;
    let csv_path = dir.join("oracle.csv");
    let json_path = dir.join("oracle_summary.json");
    write_file(&csv_path, &csv)?;
    write_file(&json_path, &json)?;
    Ok(vec![csv_path, json_path])
}
