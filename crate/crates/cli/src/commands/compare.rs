use std::fmt::Write as _;
use std::path::PathBuf;

use smpctune_core::agent;
use smpctune_core::baselines::{self, OracleResult};
use smpctune_core::environment::Environment;

use super::{ensure_out_dir, write_file};
use crate::config::ExperimentConfig;
use crate::error::Result;

struct Row {
    method: &'static str,
    seed: u64,
    evaluations: u64,
    best_reward: f64,
    regret: f64,
    final_state: usize,
    wall_time_ms: f64,
}

/// Per-seed results of every method on one environment.
struct MethodRuns {
    oracle: OracleResult,
    rows: Vec<Row>,
}

fn run_methods(cfg: &ExperimentConfig, env: &Environment) -> Result<MethodRuns> {
    let oracle = baselines::grid_search(env)?;
    let hp = cfg.hyperparams();
    let mut rows = vec![Row {
        method: "grid",
        seed: 0,
        evaluations: oracle.evaluations,
        best_reward: oracle.best_reward,
        regret: 0.0,
        final_state: oracle.argmax_state.0,
        wall_time_ms: oracle.eval_time_ms,
    }];
    for seed in cfg.sorted_seeds() {
        let (q, trace) = agent::train(env, &hp, seed)?;
        // The learner's answer is where its greedy policy settles.
        let path = agent::greedy_rollout(&q, env, q.best_state(), env.grid().len())?;
        let final_state = *path.last().unwrap();
        let best_reward = env.evaluate(final_state)?.0;
        rows.push(Row {
            method: "qlearn",
            seed,
            evaluations: trace.steps,
            best_reward,
            regret: oracle.best_reward - best_reward,
            final_state: final_state.0,
            wall_time_ms: trace.eval_time_ms,
        });

        let rand = baselines::random_search(env, cfg.random_budget, seed, cfg.random_with_replacement)?;
        rows.push(Row {
            method: "random",
            seed,
            evaluations: rand.evaluations,
            best_reward: rand.best_reward,
            regret: oracle.best_reward - rand.best_reward,
            final_state: rand.best_state.0,
            wall_time_ms: rand.eval_time_ms,
        });
    }
    rows.sort_by(|a, b| (a.method, a.seed).cmp(&(b.method, b.seed)));
    Ok(MethodRuns { oracle, rows })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn median_of(rows: &[Row], method: &str, field: impl Fn(&Row) -> f64) -> f64 {
    let picked: Vec<f64> = rows
        .iter()
        .filter(|r| r.method == method)
        .map(field)
        .collect();
    median(&picked)
}

/// Runs all three methods on the default grid (emitting compare.csv) and
/// again on the larger scale grid for the summary's scalability row.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let env = cfg.build_env()?;
    let base = run_methods(cfg, &env)?;

    let mut csv =
        String::from("method,seed,evaluations,best_reward,regret,final_state,wall_time_ms\n");
    for r in &base.rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.method, r.seed, r.evaluations, r.best_reward, r.regret, r.final_state, r.wall_time_ms
        )
        .unwrap();
    }

    let scale_env = cfg.build_scale_env()?;
    let scale = run_methods(cfg, &scale_env)?;

    let seeds = cfg.sorted_seeds();
    let seed_list = seeds
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let mut txt = String::new();
    writeln!(txt, "tuning method comparison").unwrap();
    writeln!(
        txt,
        "seeds: {seed_list} | qlearn: {} episodes x horizon {} | random budget: {}{}",
        cfg.episodes,
        cfg.horizon,
        cfg.random_budget,
        if cfg.random_with_replacement {
            " (with replacement)"
        } else {
            " (without replacement)"
        }
    )
    .unwrap();
    writeln!(
        txt,
        "wall time = modeled protocol milliseconds consumed by each method's evaluations; medians over the seed list"
    )
    .unwrap();
    writeln!(txt).unwrap();

    writeln!(txt, "feature: optimization process").unwrap();
    writeln!(
        txt,
        "  qlearn learns from rewards; grid enumerates exhaustively; random probes uniformly"
    )
    .unwrap();
    writeln!(
        txt,
        "  median regret on {} states: qlearn {}, grid 0, random {}",
        env.grid().len(),
        median_of(&base.rows, "qlearn", |r| r.regret),
        median_of(&base.rows, "random", |r| r.regret)
    )
    .unwrap();
    writeln!(txt).unwrap();

    writeln!(txt, "feature: efficiency").unwrap();
    writeln!(
        txt,
        "  median evaluations: qlearn {}, grid {}, random {}",
        median_of(&base.rows, "qlearn", |r| r.evaluations as f64),
        base.oracle.evaluations,
        median_of(&base.rows, "random", |r| r.evaluations as f64)
    )
    .unwrap();
    writeln!(
        txt,
        "  median wall ms on {} states: qlearn {}, grid {}, random {}",
        env.grid().len(),
        median_of(&base.rows, "qlearn", |r| r.wall_time_ms),
        base.oracle.eval_time_ms,
        median_of(&base.rows, "random", |r| r.wall_time_ms)
    )
    .unwrap();
    writeln!(txt).unwrap();

    writeln!(
        txt,
        "feature: scalability ({} states vs {} states, wall ms)",
        env.grid().len(),
        scale_env.grid().len()
    )
    .unwrap();
    writeln!(
        txt,
        "  grid: {} vs {}",
        base.oracle.eval_time_ms, scale.oracle.eval_time_ms
    )
    .unwrap();
    writeln!(
        txt,
        "  qlearn (median): {} vs {}",
        median_of(&base.rows, "qlearn", |r| r.wall_time_ms),
        median_of(&scale.rows, "qlearn", |r| r.wall_time_ms)
    )
    .unwrap();
    writeln!(
        txt,
        "  random (median): {} vs {}",
        median_of(&base.rows, "random", |r| r.wall_time_ms),
        median_of(&scale.rows, "random", |r| r.wall_time_ms)
    )
    .unwrap();
    writeln!(
        txt,
        "  qlearn median regret at scale: {}",
        median_of(&scale.rows, "qlearn", |r| r.regret)
    )
    .unwrap();

    let dir = ensure_out_dir(cfg)?;
    let csv_path = dir.join("compare.csv");
    let txt_path = dir.join("compare_summary.txt");
    write_file(&csv_path, &csv)?;
    write_file(&txt_path, &txt)?;
    Ok(vec![csv_path, txt_path])
}
