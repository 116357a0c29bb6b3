use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn smpctune(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smpctune"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_cfg(dir: &Path, body: &str) -> String {
    let path = dir.join("cfg.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn unknown_config_key_exits_1_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "episodes = 10\nblock_sizes = [1, 2]\n");
    let out = smpctune(&["oracle", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(stderr(&out).contains("block_sizes"), "{}", stderr(&out));
}

#[test]
fn out_of_range_gamma_exits_1_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "gamma = 1.5\n");
    let out = smpctune(&["oracle", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(stderr(&out).contains("gamma"), "{}", stderr(&out));
}

#[test]
fn missing_config_file_exits_1() {
    let out = smpctune(&["oracle", "--config", "/nonexistent/cfg.toml"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(
        stderr(&out).contains("/nonexistent/cfg.toml"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn unwritable_out_dir_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("occupied");
    fs::write(&blocker, "file, not a directory").unwrap();
    let out_arg = blocker.join("out");
    let out = smpctune(&["oracle", "--out", out_arg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn drift_without_schedule_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out_arg = dir.path().join("out");
    let out = smpctune(&["drift", "--out", out_arg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(stderr(&out).contains("drift_episodes"), "{}", stderr(&out));
}

#[test]
fn oracle_emits_one_row_per_state() {
    let dir = tempfile::tempdir().unwrap();
    let out_arg = dir.path().join("out");
    let out = smpctune(&["oracle", "--out", out_arg.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let csv = fs::read_to_string(out_arg.join("oracle.csv")).unwrap();
    assert_eq!(csv.lines().count(), 61); // header + 60 states
}

#[test]
fn train_emits_one_row_per_episode_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out_arg = dir.path().join("out");
    let out = smpctune(&[
        "train",
        "--episodes",
        "7",
        "--seed",
        "4,2,9",
        "--out",
        out_arg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let csv = fs::read_to_string(out_arg.join("train.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 7 * 3);
    // Seeds are reported in ascending order regardless of flag order.
    let first_cols: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first_cols[0], "2");
}

#[test]
fn oracle_output_matches_the_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_arg = dir.path().join("out");
    let out = smpctune(&["oracle", "--out", out_arg.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let got = fs::read(out_arg.join("oracle.csv")).unwrap();
    let want = fs::read(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/golden/oracle_default.csv"
    ))
    .unwrap();
    assert_eq!(got, want, "default-grid oracle drifted from the golden file");
}
