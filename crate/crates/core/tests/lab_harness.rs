use std::fs;
use std::path::Path;
use std::process::Command;

use seglab::diagnostics::{read_snapshots_csv, SNAPSHOT_COLUMNS};
use seglab::lab::{run_evolve, run_stationary, trajectory_file_name, with_jobs, LabRun, Scenario};
use seglab::Error;

const SMALL: &str = r#"
schema_version = 1
name = "small"
seed = 17

[model]
n_interior = 60
m1 = "2*(1-x)"
m2 = "2*x"
k = [10, 100, 1000]

[evolve]
dt = 1e-3
t_end = 3.0
min_time = 0.6

[stationary]
n_scan = 400
probe_seeds = 3

[genericity]
n_perturb = 4
"#;

fn small() -> Scenario {
    Scenario::from_toml_str(SMALL).unwrap()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn evolve_outputs_are_byte_identical_across_runs_and_pools() {
    let sc = small();
    let dirs: Vec<tempfile::TempDir> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (dir, jobs) in dirs.iter().zip([Some(1), Some(3), None]) {
        with_jobs(jobs, || run_evolve(&sc)).unwrap().unwrap().write(dir.path()).unwrap();
    }
    let first = read_dir_sorted(dirs[0].path());
    assert_eq!(first.len(), 5);
    for d in &dirs[1..] {
        assert_eq!(read_dir_sorted(d.path()), first);
    }
}

#[test]
fn stationary_outputs_are_deterministic() {
    let sc = small();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    with_jobs(Some(1), || run_stationary(&sc)).unwrap().unwrap().write(a.path()).unwrap();
    with_jobs(Some(4), || run_stationary(&sc)).unwrap().unwrap().write(b.path()).unwrap();
    assert_eq!(read_dir_sorted(a.path()), read_dir_sorted(b.path()));
}

#[test]
fn trajectories_validate_against_snapshot_schema() {
    let sc = small();
    let dir = tempfile::tempdir().unwrap();
    run_evolve(&sc).unwrap().write(dir.path()).unwrap();
    for &k in &sc.model.k {
        let path = dir.path().join(trajectory_file_name(k));
        let header = fs::read_to_string(&path).unwrap().lines().next().unwrap().to_string();
        assert_eq!(header, SNAPSHOT_COLUMNS.join(","));
        let rows = read_snapshots_csv(fs::File::open(&path).unwrap()).unwrap();
        assert!(rows.len() > 1 && rows.iter().all(|r| r.is_valid()));
        assert_eq!(rows[0].t, 0.0);
    }
    for (_, bytes) in read_dir_sorted(dir.path()) {
        let text = String::from_utf8(bytes).unwrap();
        assert!(!text.contains("NaN") && !text.contains("inf"));
    }
}

#[test]
fn zero_horizon_reports_initial_diagnostics_only() {
    let sc = Scenario::from_toml_str(&SMALL.replace("t_end = 3.0", "t_end = 0.0")).unwrap();
    let run = run_evolve(&sc).unwrap();
    for e in run.completed() {
        assert_eq!(e.trajectory.len(), 1);
        assert_eq!(e.state.t, 0.0);
    }
    assert!(run.report.all_pass(), "{:?}", run.report.failed().collect::<Vec<_>>());
}

#[test]
fn small_sweep_shows_monotone_diagnostics() {
    let run = run_evolve(&small()).unwrap();
    for name in ["a-priori-bounds", "k-cancellation", "proj-error-decreasing", "remainder-decreasing", "steady-every-k"] {
        assert!(run.report.check(name).unwrap().pass, "{name}");
    }
}

#[test]
fn vanishing_boundary_data_is_rejected() {
    let bad = SMALL.replace("m1 = \"2*(1-x)\"", "m1 = 0").replace("m2 = \"2*x\"", "m2 = 0");
    assert!(matches!(Scenario::from_toml_str(&bad), Err(Error::Config(_))));
}

#[test]
fn inert_kinetics_gives_the_linear_solution() {
    let src = SMALL
        .replace("[model]", "[model]\nkinetics = { type = \"inert\" }")
        .replace("m1 = \"2*(1-x)\"", "m1 = \"x\"")
        .replace("m2 = \"2*x\"", "m2 = 0");
    let run = run_stationary(&Scenario::from_toml_str(&src).unwrap()).unwrap();
    assert_eq!(run.shooting.solutions.len(), 1);
    let s = &run.shooting.solutions[0];
    assert!((s.slope - 1.0).abs() < 1e-12);
    let g = s.solution.w.grid();
    assert!(s.solution.w.values().iter().enumerate().all(|(i, w)| (w - g.node(i)).abs() < 1e-12));
}

#[test]
fn shipped_scenario_matches_builtin() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/default.toml");
    assert_eq!(Scenario::load(path).unwrap(), Scenario::builtin_default());
}

fn seglab(args: &[&str], env_out: Option<&Path>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_seglab"));
    cmd.args(args).env_remove("SEGLAB_OUT_DIR");
    if let Some(p) = env_out {
        cmd.env("SEGLAB_OUT_DIR", p);
    }
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn cli_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let good = tmp.path().join("small.toml");
    fs::write(&good, SMALL).unwrap();
    let strict = tmp.path().join("strict.toml");
    fs::write(&strict, format!("{SMALL}\n[checks]\nepsilon = 1e-9\n")).unwrap();
    let broken = tmp.path().join("broken.toml");
    fs::write(&broken, "schema_version = 1\nname = \n").unwrap();
    let out = tmp.path().join("out");
    let out_s = out.to_str().unwrap();

    let (code, stdout) = seglab(&["spectrum", good.to_str().unwrap(), "--out-dir", out_s], None);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")));
    assert!(out.join("spectrum.csv").exists());

    let (code, stdout) = seglab(&["evolve", strict.to_str().unwrap(), "--out-dir", out_s, "--jobs", "2"], None);
    assert_eq!(code, 1);
    assert!(stdout.contains("FAIL seg-pointwise-at-max-k"));

    assert_eq!(seglab(&["evolve", broken.to_str().unwrap(), "--out-dir", out_s], None).0, 2);
    assert_eq!(seglab(&["stationary", "/no/such/file.toml", "--out-dir", out_s], None).0, 2);
    assert_eq!(seglab(&["evolve"], None).0, 2);
    assert_eq!(seglab(&["evolve", good.to_str().unwrap(), "--jobs", "0", "--out-dir", out_s], None).0, 2);

    let env_dir = tmp.path().join("from_env");
    let (code, _) = seglab(&["shoot", "--a", "2", "--b", "-2", "--scenario", good.to_str().unwrap()], Some(&env_dir));
    assert_eq!(code, 0);
    assert!(env_dir.join("solutions.csv").exists());

    let (code, _) = seglab(&["genericity", good.to_str().unwrap(), "--seed", "5", "--out-dir", out_s], None);
    assert_eq!(code, 0);
    assert_eq!(fs::read_to_string(out.join("genericity.csv")).unwrap().lines().count(), 5);
}
