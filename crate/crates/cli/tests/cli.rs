use std::path::Path;
use std::process::{Command, Output};

fn singlet(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singlet"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn last_fidelity(csv: &str) -> f64 {
    let last = csv.lines().last().unwrap();
    last.split(',').nth(1).unwrap().parse().unwrap()
}

#[test]
fn run_fig3_writes_csv_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let o = singlet(&["run", "--scenario", "fig3", "--n", "3", "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("F_3(t_f) = 0.997"));
    let csv = std::fs::read_to_string(dir.path().join("out/fig3_timeseries.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,fidelity,dark_overlap,trace,photon_mean");
    assert_eq!(csv.lines().count(), 1002);
    assert!((last_fidelity(&csv) - 0.997).abs() < 0.02);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/fig3_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["scenario"], "fig3");
    assert!(meta["seed"].is_u64());
    assert_eq!(meta["params"]["pulse_width"], 800.0);
}

#[test]
fn rerun_from_meta_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = singlet(&["run", "--scenario", "fig3", "--n", "4", "--out", "a"], dir.path());
    assert!(first.status.success(), "{}", stderr(&first));
    let again = singlet(&["run", "a/fig3_meta.json", "--out", "b"], dir.path());
    assert!(again.status.success(), "{}", stderr(&again));
    let a = std::fs::read(dir.path().join("a/fig3_timeseries.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/fig3_timeseries.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn zero_duration_gives_one_sample() {
    let dir = tempfile::tempdir().unwrap();
    let o = singlet(&["run", "--scenario", "fig3", "--n", "3", "--t-final", "0", "--out", "."], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("fig3_timeseries.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("0.0000000000000000e0,"));
    // |<S_3|zeta_{0,3}>|^2 = 1/3.
    assert!((last_fidelity(&csv) - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn strict_miss_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = singlet(&["run", "--scenario", "fig3", "--n", "3", "--t-final", "0", "--strict", "--out", "."], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("[MISS]"));
}

#[test]
fn malformed_key_exits_1_with_name() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "[params]\nomega00 = 1.0\n").unwrap();
    let o = singlet(&["run", "bad.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("omega00"));
    std::fs::write(dir.path().join("top.toml"), "scenarios = \"fig3\"\n").unwrap();
    let o = singlet(&["validate", "top.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("scenarios"));
}

#[test]
fn invalid_values_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["run", "--scenario", "fig9"][..],
        &["run", "--n", "1"],
        &["run", "--format", "png"],
        &["run", "--frobnicate"],
    ] {
        let o = singlet(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn validate_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = singlet(&["validate"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("config ok"));
    assert!(!dir.path().join("results").exists());
}

#[test]
fn config_file_layout() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "scenario = \"fig3\"\nout = \"res\"\nformats = [\"csv\", \"svg\"]\nseed = 7\nverbosity = \"quiet\"\n\n[params]\nn = 3\npulse_width = 80.0\nsamples = 20\n",
    )
    .unwrap();
    let o = singlet(&["run", "run.toml"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("res/fig3_timeseries.csv").exists());
    assert!(dir.path().join("res/fig3.svg").exists());
    assert!(!dir.path().join("res/fig3_meta.json").exists());
    let svg = std::fs::read_to_string(dir.path().join("res/fig3.svg")).unwrap();
    assert!(svg.contains("<svg") && svg.contains("fidelity"));
}

#[test]
fn svg_does_not_change_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "--scenario", "fig3", "--n", "3", "--t-final", "400"];
    let a = singlet(&[&args[..], &["--out", "a", "--format", "csv"]].concat(), dir.path());
    let b = singlet(&[&args[..], &["--out", "b", "--format", "csv,svg"]].concat(), dir.path());
    assert!(a.status.success() && b.status.success());
    assert_eq!(
        std::fs::read(dir.path().join("a/fig3_timeseries.csv")).unwrap(),
        std::fs::read(dir.path().join("b/fig3_timeseries.csv")).unwrap()
    );
}

#[test]
fn sweep_fig5_three_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = singlet(
        &["sweep", "--scenario", "fig5", "--n", "3", "--axis", "kappa", "--values", "0,0.05,0.1", "--out", "."],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("fig5_sweep.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "kappa,fidelity,fidelity_se,runtime_s,status");
    assert_eq!(lines.len(), 4);
    let f: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!((f[0] - 0.997).abs() < 0.02);
    assert!((f[2] - 0.994).abs() < 0.02);
    assert!(f[0] > f[1] && f[1] > f[2]);
    assert!(lines[1..].iter().all(|l| l.ends_with(",ok")));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig5_sweep_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["params"]["solver"], "lindblad");
    assert_eq!(meta["sweep"]["axis"], "kappa");
}

#[test]
fn sweep_rejects_empty_values_and_bad_axis() {
    let dir = tempfile::tempdir().unwrap();
    let o = singlet(&["sweep", "--axis", "kappa", "--values", ""], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = singlet(&["sweep", "--axis", "kappa"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = singlet(&["sweep", "--axis", "n", "--values", "3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("axis"));
    let o = singlet(&["sweep", "--axis", "kappa", "--values", "-0.1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn list_names_every_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let o = singlet(&["list"], dir.path());
    assert!(o.status.success());
    let out = stdout(&o);
    for name in ["fig3", "fig4", "fig5", "feasibility", "elimination"] {
        assert!(out.lines().any(|l| l.starts_with(name)), "{name}");
    }
}
