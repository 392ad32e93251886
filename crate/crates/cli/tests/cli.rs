use std::path::Path;
use std::process::{Command, Output};

fn rfdna(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfdna"))
        .env("RFDNA_DATA_ROOT", root)
        .args(args)
        .output()
        .expect("spawn rfdna")
}

const SMALL: &[&str] = &[
    "--snr-grid",
    "15",
    "--n-z",
    "1",
    "--n-b",
    "20",
    "--k-folds",
    "2",
    "--nr-grid",
    "1:21:10",
    "--methods",
    "relieff,ttest",
    "--relieff-neighbors",
    "5",
];

fn with_small<'a>(head: &[&'a str]) -> Vec<&'a str> {
    head.iter().copied().chain(SMALL.iter().copied()).collect()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();

    let o = rfdna(root, &with_small(&["synth", "--bursts", "30"]));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(root.join("cohort/manifest.json").exists());
    assert!(root.join("cohort/MS63A7.iq").exists());

    let o = rfdna(root, &with_small(&["fingerprint", "--csv"]));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(root.join("stores/snr_15.rfdn").exists());
    assert!(root.join("stores/snr_15.csv").exists());

    let o = rfdna(root, &with_small(&["select", "--trials", "1"]));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let ranking = std::fs::read_to_string(root.join("rankings/snr_15/trial1/MS63A7_relieff.csv")).unwrap();
    assert_eq!(ranking.lines().count(), 205);

    // gates may or may not pass at this scale; anything but an error is fine
    let o = rfdna(root, &with_small(&["train", "--trials", "1"]));
    assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
    let models = root.join("models/snr_15/trial1/relieff");
    assert!(models.join("MS63A7.model.json").exists());
    assert!(models.join("MS63A7.candidates.csv").exists());

    let o = rfdna(root, &with_small(&["evaluate", "--trials", "1"]));
    assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("trial 1")).count(), 2);
    let gates_ok = !stdout.contains("FAIL");
    assert_eq!(code(&o) == 0, gates_ok);

    let o = rfdna(root, &with_small(&["report"]));
    assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(root.join("reports/results.csv")).unwrap();
    // header + 2 methods x (6 TVR + 30 others + 72 rogue)
    assert_eq!(csv.lines().count(), 1 + 2 * (6 + 30 + 72));
    assert!(root.join("reports/plots/trial1_snr15_relieff.csv").exists());
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"snr_grid": [0.0, 5.0], "n_z": 2, "k_folds": 0}"#).unwrap();
    // k_folds 0 in the file is invalid
    let o = rfdna(dir.path(), &["--config", cfg.to_str().unwrap(), "report"]);
    assert_eq!(code(&o), 2);
    // a flag overrides the file but validation still runs on the merged result
    let o = rfdna(dir.path(), &["--config", cfg.to_str().unwrap(), "--k-folds", "3", "report"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("evaluate"));
    std::fs::write(&cfg, r#"{"unknown_field": 1}"#).unwrap();
    let o = rfdna(dir.path(), &["--config", cfg.to_str().unwrap(), "report"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn missing_inputs_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = rfdna(dir.path(), &["train", "--snr", "21", "--trials", "1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("fingerprint"));
    let o = rfdna(dir.path(), &["evaluate", "--trials", "9"]);
    assert_eq!(code(&o), 2);
    let o = rfdna(dir.path(), &["--methods", "bogus", "report"]);
    assert_eq!(code(&o), 2);
    let o = rfdna(dir.path(), &["--snr-grid", "3,-3", "report"]);
    assert_eq!(code(&o), 2);
}
