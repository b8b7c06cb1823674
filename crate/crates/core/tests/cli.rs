use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn opinion(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opinion"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL_SWEEP: &str = r#"
[[experiment]]
id = "tiny"
trials = 12
seed = 3
grid = { delta = 0.25 }
network = { model = "symmetric_two_block", n_per_block = 5, a_in = 2.0, a_out = 1.0 }
media = { rule = "relative", b_tilde = 1.0 }
init = { scheme = "general_divergent" }
sweep = { axis = "b_tilde", values = [0.5, 6.0] }
"#;

#[test]
fn simulate_prop1_reports_a_two_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let o = opinion(
        &["simulate", "--preset", "prop1", "--out", "trace.csv"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("cycle (period 2)"), "{}", stdout(&o));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.lines().count() > 2);
}

#[test]
fn sweep_is_byte_identical_across_runs_and_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tiny.toml"), SMALL_SWEEP).unwrap();
    let a = opinion(
        &["sweep", "--config", "tiny.toml", "--out", "a.csv"],
        dir.path(),
    );
    let b = opinion(
        &[
            "--jobs",
            "1",
            "sweep",
            "--config",
            "tiny.toml",
            "--out",
            "b.csv",
        ],
        dir.path(),
    );
    assert!(
        a.status.success() && b.status.success(),
        "{}{}",
        stderr(&a),
        stderr(&b)
    );
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let b = fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("experiment_id,network_model,n,delta,lambda,"));
}

#[test]
fn seed_flag_changes_the_draws() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tiny.toml"), SMALL_SWEEP).unwrap();
    let a = opinion(&["sweep", "--config", "tiny.toml"], dir.path());
    let b = opinion(
        &["sweep", "--config", "tiny.toml", "--seed", "99"],
        dir.path(),
    );
    assert!(a.status.success() && b.status.success());
    assert_ne!(stdout(&a), stdout(&b));
}

#[test]
fn empty_sweep_axis_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SMALL_SWEEP.replace("values = [0.5, 6.0]", "values = []");
    fs::write(dir.path().join("empty.toml"), cfg).unwrap();
    let o = opinion(&["sweep", "--config", "empty.toml"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SMALL_SWEEP.replace("seed = 3", "seed = 3\ntrails = 5");
    fs::write(dir.path().join("bad.toml"), cfg).unwrap();
    let o = opinion(&["sweep", "--config", "bad.toml"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("trails"), "{}", stderr(&o));
}

#[test]
fn gadget_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = opinion(&["gadget", "--n", "3"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("82"), "{}", stdout(&o));
}

#[test]
fn gadget_rejects_small_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let o = opinion(&["gadget", "--n", "3", "--ratio", "5"], dir.path());
    assert!(!o.status.success());
}

#[test]
fn partition_splits_bridged_triangles() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("g.txt"),
        "# two triangles\n0 2\n2 4\n0 4\n1 3\n3 5\n1 5\n4 5\n",
    )
    .unwrap();
    let o = opinion(&["partition", "g.txt", "--out", "sides.txt"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let sides = fs::read_to_string(dir.path().join("sides.txt")).unwrap();
    let side_of = |id: &str| {
        sides
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{id} ")))
            .unwrap()
            .to_string()
    };
    assert_eq!(side_of("0"), side_of("2"));
    assert_eq!(side_of("2"), side_of("4"));
    assert_ne!(side_of("0"), side_of("1"));
}

#[test]
fn partition_reports_the_bad_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), "0 1\n1 x\n").unwrap();
    let o = opinion(&["partition", "g.txt"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("g.txt:2:"), "{}", stderr(&o));
}

#[test]
fn theory_prints_exact_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let o = opinion(&["theory", "--h", "2", "--delta", "0.25"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("tau1 = 11/3"), "{}", stdout(&o));
}

#[test]
fn missing_source_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = opinion(&["sweep"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error:"));
}
