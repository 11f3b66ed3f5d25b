//! End-to-end runs of the `graphon-lab` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(config: &str, out: &Path, extra: &[&str]) -> Output {
    let cfg = out.join("config-input.json");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_graphon-lab"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn run_dir(output: &Output) -> PathBuf {
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    PathBuf::from(String::from_utf8(output.stdout.clone()).unwrap().trim())
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn error_doc(output: &Output) -> Value {
    serde_json::from_str(String::from_utf8_lossy(&output.stderr).trim()).unwrap()
}

const MOMENTS: &str = r#"{"command":"moments","seed":3,"graphon":{"type":"constant","c":1.0},"orders":[2,4]}"#;

#[test]
fn moments_command_writes_the_standard_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = run_dir(&run(MOMENTS, tmp.path(), &[]));
    assert_eq!(dir.parent().unwrap(), tmp.path().join("moments"));
    for name in ["config.json", "moments.csv", "report.json"] {
        assert!(dir.join(name).is_file(), "{name} missing");
    }
    let r = report(&dir);
    assert_eq!(r["result"]["moments"]["2"], 2.0);
    assert_eq!(r["result"]["moments"]["4"], 9.0);
    assert_eq!(r["config"]["source"], "laplacian");
    let csv = fs::read_to_string(dir.join("moments.csv")).unwrap();
    assert!(csv.starts_with("# config: {"));
    assert!(csv.contains("\n4,9\n"));
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let config = r#"{"command":"simulate","seed":11,"ensemble":{"type":"generalized_wigner","graphon":{"type":"product","profile":"sqrt"}},"N":120,"trials":2}"#;
    let a = run_dir(&run(config, tmp.path(), &[]));
    let b = run_dir(&run(config, tmp.path(), &[]));
    assert_ne!(a, b);
    for name in ["config.json", "eigenvalues.csv", "histogram.csv", "report.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name} differs");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = run_dir(&run(MOMENTS, tmp.path(), &["--seed", "77"]));
    let config: Value = serde_json::from_str(&fs::read_to_string(dir.join("config.json")).unwrap()).unwrap();
    assert_eq!(config["seed"], 77);
}

#[test]
fn config_errors_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    for bad in [
        r#"{"command":"moments","graphon":{"type":"constant","c":1.0}}"#,
        r#"{"command":"moments","seed":1}"#,
        r#"{"command":"moments","seed":1,"graphon":{"type":"constant","c":1.5}}"#,
        r#"{"command":"teleport","seed":1}"#,
        "not json",
    ] {
        let out = run(bad, tmp.path(), &[]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
        assert_eq!(error_doc(&out)["exit_code"], 2);
    }
    assert!(!tmp.path().join("moments").exists(), "failed runs must not create output directories");
}

#[test]
fn capacity_errors_exit_with_4() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(r#"{"command":"moments","seed":1,"graphon":{"type":"constant","c":1.0},"orders":[14]}"#, tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_doc(&out)["error"], "capacity");
}

#[test]
fn convergence_errors_exit_with_3() {
    let tmp = tempfile::tempdir().unwrap();
    // two vertices of expected degree 1 need p = 1, i.e. x = ∞
    let out = run(r#"{"command":"constrained-fit","seed":1,"kstar":[1,1],"trials":1}"#, tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    let doc = error_doc(&out);
    assert_eq!(doc["error"], "convergence");
    assert!(doc["residual"].as_f64().unwrap() > 0.0);
}

#[test]
fn freeconv_default_grid_integrates_to_one() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = run_dir(&run(r#"{"command":"freeconv","seed":0}"#, tmp.path(), &[]));
    let csv = fs::read_to_string(dir.join("density.csv")).unwrap();
    let rows: Vec<(f64, f64)> = csv
        .lines()
        .skip(2)
        .map(|l| {
            let (x, d) = l.split_once(',').unwrap();
            (x.parse().unwrap(), d.parse().unwrap())
        })
        .collect();
    let mass: f64 = rows.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[1].1 + w[0].1)).sum();
    assert!((mass - 1.0).abs() < 1e-3, "{mass}");
    assert!(dir.join("stieltjes.csv").is_file());
}

#[test]
fn erdos_hist_recipe_histograms_1000_eigenvalues() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = run_dir(&run(r#"{"command":"simulate","seed":5,"recipe":"erdos-hist"}"#, tmp.path(), &[]));
    let eig = fs::read_to_string(dir.join("eigenvalues.csv")).unwrap();
    assert_eq!(eig.lines().count(), 2 + 1000);
    let hist = fs::read_to_string(dir.join("histogram.csv")).unwrap();
    let total: u64 = hist.lines().skip(2).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 1000);
    let r = report(&dir);
    assert_eq!(r["config"]["N"], 1000);
    assert_eq!(r["config"]["ensemble"]["eps"], 0.25);
}

#[test]
fn compare_reports_moments_and_distances() {
    let tmp = tempfile::tempdir().unwrap();
    let config = r#"{"command":"compare","seed":2,"ensemble":{"type":"generalized_wigner","graphon":{"type":"constant","c":1.0}},"N":400,"trials":1,"orders":[2,4]}"#;
    let r = report(&run_dir(&run(config, tmp.path(), &[])));
    let emp = r["result"]["empirical"]["moments"]["2"].as_f64().unwrap();
    assert!((emp - 2.0).abs() < 0.2, "{emp}");
    assert_eq!(r["result"]["theoretical"]["moments"]["4"], 9.0);
    let d = &r["result"]["distances"];
    for key in ["levy_to_decoupled", "ks_to_decoupled", "ks_to_gamma_m"] {
        let v = d[key].as_f64().unwrap();
        assert!((0.0..0.2).contains(&v), "{key} = {v}");
    }
}

#[test]
fn norm_scan_constrained_fit_and_cutnorm_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let scan = r#"{"command":"norm-scan","seed":4,"ensemble":{"type":"generalized_wigner","graphon":{"type":"constant","c":0.5}},"Ns":[64,128],"trials":2}"#;
    let dir = run_dir(&run(scan, tmp.path(), &[]));
    let csv = fs::read_to_string(dir.join("norm_scan.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("N,trial,norm,ratio"));
    assert_eq!(csv.lines().count(), 2 + 4);

    let fit = r#"{"command":"constrained-fit","seed":4,"N":200,"trials":5}"#;
    let r = report(&run_dir(&run(fit, tmp.path(), &[])));
    assert!(r["result"]["residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["config"]["kstar"].as_array().unwrap().len(), 200);

    let cut = r#"{"command":"cutnorm","seed":4,
        "graphon":{"type":"step","n":2,"values":[[1.0,0.0],[0.0,0.5]]},
        "reference":{"type":"step","n":2,"values":[[0.5,0.0],[0.0,1.0]]}}"#;
    let r = report(&run_dir(&run(cut, tmp.path(), &[])));
    assert!(r["result"]["cut_distance"]["value"].as_f64().unwrap() < 1e-12);
    assert_eq!(r["result"]["cut_norm_exact"], r["result"]["cut_norm_heuristic"]);
}
