use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = "kind = pd_vs_n\nm_antennas = 4\nn_pilot = 16\np_b = 5\np_e = -5dB\nsweep = n_both: 16, 32\npfa_targets = 0.01\ntrials = 200\nmaster_seed = 5\n";

fn pilotguard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pilotguard")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn writes_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.conf", CONFIG);
    let out = pilotguard(&["pd-vs-n", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sweep_value,metric,empirical,theoretical,trials,stderr"));
    assert!(text.contains("16,pd@0.01,"));
    assert!(text.contains("32,ils_iterations,"));
}

#[test]
fn out_flag_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.conf", CONFIG);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    for (path, seed) in [(&a, "1"), (&b, "1"), (&c, "2")] {
        let out = pilotguard(&["pd-vs-n", "--config", &cfg, "--trials", "50", "--seed", seed, "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let (a, b, c) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), std::fs::read(c).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(String::from_utf8(a).unwrap().contains(",50,"));
}

#[test]
fn output_path_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_config.csv");
    let cfg = write(dir.path(), "a.conf", &format!("{CONFIG}output_path = {}\n", target.display()));
    assert_eq!(pilotguard(&["pd-vs-n", "--config", &cfg]).status.code(), Some(0));
    assert!(target.exists());
}

#[test]
fn kind_may_come_from_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.conf", &CONFIG.replace("kind = pd_vs_n\n", ""));
    assert_eq!(pilotguard(&["pd-vs-n", "--config", &cfg]).status.code(), Some(0));
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.conf", &CONFIG.replace("p_b = 5", "p_b = five"));
    let out = pilotguard(&["pd-vs-n", "--config", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("p_b") && err.contains("line 4"), "{err}");

    let cfg = write(dir.path(), "a.conf", CONFIG);
    assert_eq!(pilotguard(&["roc", "--config", &cfg]).status.code(), Some(1));
    assert_eq!(pilotguard(&["pd-vs-n"]).status.code(), Some(1));
    assert_eq!(pilotguard(&["frobnicate", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn io_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.conf");
    assert_eq!(pilotguard(&["pd-vs-n", "--config", missing.to_str().unwrap()]).status.code(), Some(2));

    let cfg = write(dir.path(), "a.conf", CONFIG);
    let unwritable = dir.path().join("no_such_dir").join("out.csv");
    let out = pilotguard(&["pd-vs-n", "--config", &cfg, "--out", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_0() {
    assert_eq!(pilotguard(&["--help"]).status.code(), Some(0));
}
