use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mrflock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrflock"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.cfg");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn first_line(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_owned()
}

#[test]
fn writes_three_csvs_with_headers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = mrflock(&["--steps", "20", "--quiet", "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());

    assert_eq!(first_line(&out.join("trajectory.csv")), "t,agent_id,px,py,vx,vy,ux,uy");
    assert_eq!(first_line(&out.join("metrics.csv")), "t,order,d_min,d_max,d_avg");
    assert_eq!(first_line(&out.join("summary.csv")), "agent_id,u_avg,traj_length");

    let traj = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().count(), 1 + 21 * 7);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 7);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "# small flock\nn_agents = 4\nsteps = 500\nrng_seed = 3\n");
    let out = dir.path().join("out");
    let o = mrflock(&["--config", &cfg, "--steps", "5", "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!o.stdout.is_empty());
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 1 + 6);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 4);
}

#[test]
fn seed_changes_output_and_repeats_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = mrflock(&["--steps", "30", "--seed", seed, "--quiet", "--out-dir", out.to_str().unwrap()]);
        assert!(o.status.success());
        fs::read(out.join("trajectory.csv")).unwrap()
    };
    let a = run("a", "7");
    let b = run("b", "7");
    let c = run("c", "8");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn unknown_key_is_a_config_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "steps = 5\nk = 3\nwobble = 2\n");
    let o = mrflock(&["--config", &cfg, "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("wobble"), "{err}");
}

#[test]
fn bad_values_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for text in ["alpha = 1.5\n", "dt = abc\n", "n_agents = 1\n", "a = 100\n"] {
        let cfg = write_config(dir.path(), text);
        let o = mrflock(&["--config", &cfg, "--quiet", "--out-dir", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text}");
    }
    let missing = dir.path().join("nope.cfg");
    let o = mrflock(&["--config", missing.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn crowded_spawn_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_agents = 60\nspawn_radius = 1.1\nsteps = 1\n");
    let o = mrflock(&["--config", &cfg, "--quiet", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}
