use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use leaky_cli::config::{Overrides, RunConfig, SuiteConfig};
use leaky_cli::output::{to_json, Manifest};
use leaky_cli::RunError;
use leaky_spectra::bounds::BoundReport;
use leaky_spectra::{EigRecord, Error};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn leaky(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leaky"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
}

fn read<T: serde::de::DeserializeOwned>(path: &Path) -> T {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn shipped_configs_parse() {
    for name in ["constant.toml", "gaussian.toml", "random.toml", "sobolev.toml"] {
        let cfg = RunConfig::load(&configs().join(name)).unwrap();
        cfg.validate_model().unwrap();
    }
    let suite = SuiteConfig::load(&configs().join("suite.toml")).unwrap();
    assert_eq!((suite.count, suite.gammas.len()), (20, 2));
}

#[test]
fn flags_override_the_file() {
    let mut cfg = RunConfig::load(&configs().join("random.toml")).unwrap();
    let o = Overrides { gamma: Some(0.3), d: Some(3), seed: Some(11), out: Some("elsewhere".into()) };
    cfg.apply(&o).unwrap();
    assert_eq!((cfg.model.gamma, cfg.model.d), (0.3, 3));
    assert_eq!(cfg.output_dir, PathBuf::from("elsewhere"));
    let seeded = serde_json::to_value(&cfg.potential).unwrap();
    assert_eq!(seeded["seed"], 11);

    let mut plain = RunConfig::load(&configs().join("constant.toml")).unwrap();
    let err = plain.apply(&Overrides { seed: Some(1), ..Default::default() }).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn unknown_fields_are_rejected() {
    let err = RunConfig::from_toml("[grid]\nlength = 10.0\npoints = 64\nspacing = 0.1\n").unwrap_err();
    assert!(matches!(err, RunError::Config(ref m) if m.starts_with("config:")));
}

#[test]
fn exit_codes_by_class() {
    assert_eq!(RunError::Config("grid: bad".into()).exit_code(), 2);
    assert_eq!(RunError::Numerics(Error::Decomposition("lu".into())).exit_code(), 3);
    assert_eq!(RunError::Numerics(Error::EmptySuite).exit_code(), 4);
}

#[test]
fn scan_of_constant_potential() {
    let dir = tempfile::tempdir().unwrap();
    let out = leaky(&["scan", "--config", configs().join("constant.toml").to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let eigs: Vec<EigRecord> = read(&dir.path().join("eigenvalues.json"));
    assert_eq!(eigs.len(), 1);
    assert!((eigs[0].value() - num_complex::Complex64::new(-1.0, 0.0)).norm() < 1e-9);
    let heatmap = std::fs::read_to_string(dir.path().join("heatmap.csv")).unwrap();
    assert_eq!(heatmap.lines().next(), Some("re,im,smallest_sv"));
    assert_eq!(heatmap.lines().count(), 1 + 16 * 16);
    let svg = std::fs::read_to_string(dir.path().join("eigenvalues.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<ellipse"));
    let manifest: Manifest = read(&dir.path().join("manifest.json"));
    assert!(!manifest.partial);
    assert_eq!(manifest.command, "scan");
    assert_eq!(manifest.input_sha256.len(), 64);
}

#[test]
fn bounds_on_no_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let out = leaky(
        &[
            "bounds",
            "--eigs",
            configs().join("empty_eigs.json").to_str().unwrap(),
            "--config",
            configs().join("constant.toml").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: BoundReport = read(&dir.path().join("bound_report.json"));
    assert_eq!(report.lhs, 0.0);
    assert!(report.pass);
}

#[test]
fn artifacts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = leaky(&["scan", "--config", configs().join("constant.toml").to_str().unwrap()], dir.path());
    assert!(out.status.success());
    let raw = std::fs::read(dir.path().join("eigenvalues.json")).unwrap();
    let eigs: Vec<EigRecord> = serde_json::from_slice(&raw).unwrap();
    assert_eq!(to_json(&eigs).unwrap(), raw);
    let raw = std::fs::read(dir.path().join("manifest.json")).unwrap();
    let manifest: Manifest = serde_json::from_slice(&raw).unwrap();
    assert_eq!(to_json(&manifest).unwrap(), raw);
    let cfg: RunConfig = serde_json::from_value(manifest.resolved_config).unwrap();
    assert_eq!(cfg.model.gamma, 0.5);
}

#[test]
fn missing_section_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("no_region.toml");
    std::fs::write(&cfg, "[potential]\nkind = \"constant\"\namplitude = [-2.0, 0.0]\n[grid]\nlength = 10.0\npoints = 64\n").unwrap();
    let out = leaky(&["scan", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("region:"));
    let manifest: Manifest = read(&dir.path().join("out/manifest.json"));
    assert!(manifest.partial && manifest.error.is_some());
}

#[test]
fn sweep_on_the_half_line_is_a_precondition_violation() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("sobolev.toml")).unwrap();
    let cfg = dir.path().join("on_axis.toml");
    std::fs::write(&cfg, text.replace("abs_range = [10.0, 10000.0]", "abs_range = [10.0, 10000.0]\nangle = 0.0")).unwrap();
    let out = leaky(&["sobolev", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: Manifest = read(&dir.path().join("out/manifest.json"));
    assert!(manifest.partial);
}
