use std::fmt::Write as _;
use std::path::PathBuf;

use smpctune_core::agent;
use smpctune_core::baselines;

use super::{ensure_out_dir, write_file};
use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

/// Continuous-operation runs under the configured drift schedule; writes
/// drift.csv with the learner's greedy argmax against the true (oracle)
/// argmax of whichever network model is live at that episode.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let schedule = cfg.drift_schedule()?;
    if schedule.is_empty() {
        return Err(CliError::Config(
            "drift schedule is empty (set drift_episodes and drift_latency_ms); use the train command for drift-free runs".into(),
        ));
    }

    // The oracle argmax per segment, recomputed at each drift point. The
    // probe env applies drift exactly like the training run does, so the
    // reward normalizers stay frozen at their pre-drift values.
    let mut probe = cfg.build_env()?;
    let mut segment_argmax = vec![baselines::grid_search(&probe)?.argmax_state];
    for point in &schedule {
        probe.set_network_model(point.network)?;
        segment_argmax.push(baselines::grid_search(&probe)?.argmax_state);
    }

    let hp = cfg.hyperparams();
    let mut csv = String::from("seed,episode,drift_event,greedy_argmax,oracle_argmax\n");
    for seed in cfg.sorted_seeds() {
        let mut env = cfg.build_env()?;
        let (_, trace) = agent::continuous_run(&mut env, &hp, seed, &schedule)?;
        let mut segment = 0;
        for rec in &trace.records {
            while segment < schedule.len() && schedule[segment].episode <= rec.episode {
                segment += 1;
            }
            let event = schedule
                .iter()
                .find(|p| p.episode == rec.episode)
                .map(|p| format!("latency_ms={}", p.network.latency_ms))
                .unwrap_or_default();
            writeln!(
                csv,
                "{},{},{},{},{}",
                seed, rec.episode, event, rec.greedy_argmax.0, segment_argmax[segment].0
            )
            .unwrap();
        }
    }

    let dir = ensure_out_dir(cfg)?;
    let csv_path = dir.join("drift.csv");
    write_file(&csv_path, &csv)?;
    Ok(vec![csv_path])
}
