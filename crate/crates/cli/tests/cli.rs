use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const FLAT_QUOTIENT: &str = r#"
eps = 0.1
knots = [5.0, 10.0, 100.0, 200.0]
seed = 7
[family]
kind = "flat"
n = 3
lambda = 2.0
[pair]
preset = "hardy"
n = 3
p = 2.0
[monte_carlo]
samples = 10000
"#;

const HARDY_SWEEP: &str = r#"
deltas = [10.0, 100.0]
knots = { rule = "hardy" }
eps = { rule = "inverse_delta" }
[family]
kind = "flat"
n = 3
lambda = 2.0
[pair]
preset = "hardy"
n = 3
p = 2.0
"#;

fn workspace_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn write_config(dir: &TempDir, body: &str) -> PathBuf {
    let path = dir.path().join("run.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler-hardy"))
        .args(args)
        .arg("--config")
        .arg(config)
        .env("RUST_LOG", "off")
        .output()
        .unwrap()
}

#[test]
fn exit_codes_follow_the_outcome() {
    assert_eq!(run(&["riccati"], &workspace_config("riccati_hardy.toml")).status.code(), Some(0));
    assert_eq!(run(&["sweep"], &workspace_config("sweep_inflated.toml")).status.code(), Some(1));

    let dir = TempDir::new().unwrap();
    let reversible = write_config(&dir, &FLAT_QUOTIENT.replace("lambda = 2.0", "lambda = 1.0"));
    assert_eq!(run(&["quotient"], &reversible).status.code(), Some(2));
    let unknown = write_config(&dir, &format!("{FLAT_QUOTIENT}\nbogus = 1\n"));
    assert_eq!(run(&["quotient"], &unknown).status.code(), Some(2));
    assert_eq!(run(&["quotient"], &dir.path().join("missing.toml")).status.code(), Some(2));

    // Outer knot beyond what Klein coordinates represent at κ = 1.
    let outside = write_config(
        &dir,
        r#"
eps = 0.1
knots = [10.0, 20.0, 30.0, 40.0]
[family]
kind = "hyperbolic"
n = 2
lambda = 2.0
kappa = 1.0
h = 0.0
[pair]
preset = "mckean"
n = 2
p = 2.0
kappa = 1.0
h = 0.0
[monte_carlo]
samples = 10000
"#,
    );
    assert_eq!(run(&["quotient"], &outside).status.code(), Some(3));
}

#[test]
fn json_is_byte_identical_and_records_the_seed() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, FLAT_QUOTIENT);
    let a = run(&["quotient", "--seed", "11"], &config);
    let b = run(&["quotient", "--seed", "11"], &config);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["tool"], "finsler-hardy");
    assert_eq!(doc["command"], "quotient");
    assert_eq!(doc["seed"], 11);
    assert_eq!(doc["result"]["monte_carlo"]["seed"], 11);

    let default_seed: serde_json::Value = serde_json::from_slice(&run(&["quotient"], &config).stdout).unwrap();
    assert_eq!(default_seed["seed"], 7);
}

#[test]
fn csv_starts_with_version_and_header() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, HARDY_SWEEP);
    let out = run(&["sweep", "--format", "csv"], &config);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# sweep v1"));
    assert!(lines.next().unwrap().starts_with("delta,eps,"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn out_writes_the_file_and_nothing_else() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, HARDY_SWEEP);
    let target = dir.path().join("sweep.json");
    let out = Command::new(env!("CARGO_BIN_EXE_finsler-hardy"))
        .args(["sweep", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&target)
        .env("RUST_LOG", "off")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(doc["result"]["rows"].as_array().unwrap().len(), 2);
    let mut names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names, ["run.toml", "sweep.json"]);
}
