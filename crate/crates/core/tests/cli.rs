use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ncplane(dir: &Path, args: &[&str], seed: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ncplane"));
    c.current_dir(dir).args(args).env_remove("NCPLANE_SEED");
    if let Some(s) = seed {
        c.env("NCPLANE_SEED", s);
    }
    c.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn outputs_are_byte_identical() {
    let runs: &[&[&str]] = &[
        &["algebra-check", "--theta", "0.7", "--samples", "20"],
        &["classical", "simulate", "--theta", "0.4", "--t-end", "2"],
        &["spectrum", "--theta", "1", "--n-max", "3"],
        &["thermo", "sweep", "--grid", "6x5"],
        &["wigner", "--closed-form", "--theta", "0.5", "--nodes", "5"],
    ];
    for args in runs {
        let mut seen = Vec::new();
        for _ in 0..2 {
            let d = TempDir::new().unwrap();
            let o = ncplane(d.path(), args, None);
            assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
            let mut files: Vec<_> = fs::read_dir(d.path().join("ncplane-out")).unwrap().map(|e| e.unwrap().path()).collect();
            files.sort();
            let contents: Vec<_> = files.iter().map(|f| (f.file_name().unwrap().to_owned(), fs::read(f).unwrap())).collect();
            seen.push((contents, o.stdout));
        }
        assert!(!seen[0].0.is_empty());
        assert!(seen[0] == seen[1], "{args:?} differs between runs");
    }
}

#[test]
fn exit_codes() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&ncplane(d.path(), &["spectrum"], None)), 0);
    fs::write(d.path().join("strict.toml"), "[tolerances]\nclosed_form = 1e-30\n").unwrap();
    let o = ncplane(d.path(), &["--config", "strict.toml", "classical", "simulate", "--t-end", "1"], None);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    assert_eq!(code(&ncplane(d.path(), &["spectrum", "--m", "-1"], None)), 2);
    assert_eq!(code(&ncplane(d.path(), &["spectrum"], Some("forty-two"))), 2);
    assert_eq!(code(&ncplane(d.path(), &["--config", "missing.toml", "spectrum"], None)), 2);
    assert_eq!(code(&ncplane(d.path(), &["no-such-command"], None)), 2);
    assert_eq!(code(&ncplane(d.path(), &[], None)), 2);
    assert_eq!(code(&ncplane(d.path(), &["eigenfunction", "--n", "2", "--two-j", "1"], None)), 2);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("bad.toml"), "[physics]\ntheta = 0.1\nomgea = 2.0\n").unwrap();
    let o = ncplane(d.path(), &["--config", "bad.toml", "spectrum"], None);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("omgea"));
}

#[test]
fn flags_override_the_file() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("run.toml"), "seed = 5\n[physics]\ntheta = 0.0\n[output]\ndir = \"from-file\"\n").unwrap();
    let o = ncplane(d.path(), &["--config", "run.toml", "spectrum", "--n-max", "2"], None);
    assert_eq!(code(&o), 0);
    let file_run = read(&d.path().join("from-file"), "spectrum.csv");
    assert!(file_run.lines().skip(1).all(|l| !l.starts_with("2,") || l.ends_with(",3.0000000000000000e0")));
    let o = ncplane(d.path(), &["--config", "run.toml", "--out", "flag", "spectrum", "--n-max", "2", "--theta", "1"], None);
    assert_eq!(code(&o), 0);
    let flag_run = read(&d.path().join("flag"), "spectrum.csv");
    assert_ne!(file_run, flag_run);
    assert!(flag_run.contains("2,0,3.3541019662496847e0"));
    let shown = ncplane(d.path(), &["--config", "run.toml", "--seed", "9", "config"], None);
    let text = String::from_utf8(shown.stdout).unwrap();
    assert!(text.contains("seed = 9"));
    assert!(text.contains("dir = \"from-file\""));
}

#[test]
fn seed_precedence() {
    let d = TempDir::new().unwrap();
    let samples = |out: &str| -> serde_json::Value {
        let v: serde_json::Value = serde_json::from_str(&read(&d.path().join(out), "algebra.json")).unwrap();
        v["samples"].clone()
    };
    let args = |out: &'static str| ["algebra-check", "--samples", "3", "--out", out];
    assert_eq!(code(&ncplane(d.path(), &args("default"), None)), 0);
    assert_eq!(code(&ncplane(d.path(), &args("env"), Some("7"))), 0);
    assert_eq!(code(&ncplane(d.path(), &args("env42"), Some("42"))), 0);
    assert_ne!(samples("default"), samples("env"));
    assert_eq!(samples("default"), samples("env42"));
    let mut flag = args("flag").to_vec();
    flag.extend(["--seed", "42"]);
    assert_eq!(code(&ncplane(d.path(), &flag, Some("7"))), 0);
    assert_eq!(samples("flag"), samples("default"));
    fs::write(d.path().join("s.toml"), "seed = 7\n").unwrap();
    let mut file = args("file").to_vec();
    file.extend(["--config", "s.toml"]);
    assert_eq!(code(&ncplane(d.path(), &file, None)), 0);
    assert_eq!(samples("file"), samples("env"));
    let mut both = args("env_over_file").to_vec();
    both.extend(["--config", "s.toml"]);
    assert_eq!(code(&ncplane(d.path(), &both, Some("42"))), 0);
    assert_eq!(samples("env_over_file"), samples("default"));
}

#[test]
fn command_from_config() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("job.toml"), "command = \"spectrum --n-max 1\"\n[output]\ndir = \"job\"\n").unwrap();
    let o = ncplane(d.path(), &["--config", "job.toml"], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&d.path().join("job"), "spectrum.csv").lines().count(), 4);
    fs::write(d.path().join("bad.toml"), "command = \"--seed 3\"\n").unwrap();
    assert_eq!(code(&ncplane(d.path(), &["--config", "bad.toml"], None)), 2);
}

#[test]
fn eigenfunction_and_symmetry_outputs() {
    let d = TempDir::new().unwrap();
    let o = ncplane(d.path(), &["eigenfunction", "--n", "1", "--two-j", "-1", "--theta", "0.3", "--nodes", "96"], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = d.path().join("ncplane-out");
    assert!(read(&out, "eigenfunction.csv").starts_with("px,py,re,im\n"));
    let j: serde_json::Value = serde_json::from_str(&read(&out, "eigenfunction.json")).unwrap();
    assert!(j.is_object());
    let o = ncplane(d.path(), &["classical", "symmetries", "--theta", "0.5"], None);
    assert_eq!(code(&o), 0);
    let s: serde_json::Value = serde_json::from_str(&read(&out, "symmetries.json")).unwrap();
    assert_eq!(s["pass"], serde_json::Value::Bool(true));
}
