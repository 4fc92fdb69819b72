use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nscert::constants::{Provenance, SobolevConstantTable, SobolevValues};
use nscert::spectral::{snapshot, SpectralField};
use num_complex::Complex64;
use serde_json::{json, Value};

const TWO_PI: f64 = std::f64::consts::TAU;

fn nscert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nscert"))
        .args(args)
        .env_remove("NSCERT_CONSTANTS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn table(dir: &Path, alpha: f64) -> PathBuf {
    let mut t = SobolevConstantTable::new();
    for beta in SobolevValues::betas(alpha) {
        t.set_override(beta, 3.0, Provenance::User).unwrap();
    }
    let p = dir.join("table.json");
    std::fs::write(&p, t.to_json().unwrap()).unwrap();
    p
}

fn write_config(dir: &Path, cfg: &Value) -> PathBuf {
    let p = dir.join("run.json");
    std::fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p
}

fn base_config(dir: &Path, u0: Value) -> Value {
    json!({
        "box": {"L": TWO_PI, "nu": 1.0, "alpha": 0.5},
        "solver": {"m": 3, "dt": 0.02, "t_end": 0.2, "sample_every": 0.05},
        "constants": {"table": table(dir, 0.5)},
        "data": {"u0": u0},
    })
}

fn read(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn certify_small_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &base_config(dir.path(), json!({"kind": "zero", "m": 3})));
    let out = dir.path().join("out");
    let o = nscert(&["certify", "small", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cert = read(out.join("certificate_A4.json"));
    assert_eq!(cert["passed"], true);
    assert_eq!(cert["lhs"], 0.0);
    assert!(out.join("run.meta.json").exists());

    let o = nscert(&[
        "certify",
        "small",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--data.u0={\"kind\":\"random\",\"m\":3,\"seed\":1,\"norm_alpha\":1.0}",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(read(out.join("certificate_A4.json"))["passed"], false);
}

#[test]
fn invalid_input_exits_with_two() {
    assert_eq!(code(&nscert(&["frobnicate"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let mut bad = base_config(dir.path(), json!({"kind": "zero", "m": 3}));
    bad["box"]["alpha"] = json!(0.3);
    let cfg = write_config(dir.path(), &bad);
    assert_eq!(code(&nscert(&["certify", "small", "--config", cfg.to_str().unwrap()])), 2);
    let cfg = write_config(dir.path(), &base_config(dir.path(), json!({"kind": "zero", "m": 3})));
    let o = nscert(&["certify", "small", "--config", cfg.to_str().unwrap(), "--budget.nu_bar=0.99"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn overrides_reach_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &base_config(dir.path(), json!({"kind": "zero", "m": 3})));
    let out = dir.path().join("o");
    let o = nscert(&[
        "certify",
        "small",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--box.nu=2.0",
    ]);
    assert_eq!(code(&o), 0);
    let cert = read(out.join("certificate_A4.json"));
    assert_eq!(cert["inputs"]["box"]["nu"], 2.0);
    assert_eq!(cert["inputs"]["budget"]["nu_bar"], 1.0);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let u0 = json!({"kind": "random", "m": 3, "seed": 7, "decay": 1.0, "a4_fraction": 0.5});
    let cfg = write_config(dir.path(), &base_config(dir.path(), u0));
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        for cmd in [&["simulate"][..], &["certify", "small"][..]] {
            let mut args: Vec<&str> = cmd.to_vec();
            args.extend(["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
            assert_eq!(code(&nscert(&args)), 0);
        }
        outputs.push(out);
    }
    for f in ["trajectory.csv", "manifest.json", "final.nscf", "certificate_A4.json"] {
        let a = std::fs::read(outputs[0].join(f)).unwrap();
        let b = std::fs::read(outputs[1].join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn norms_of_a_single_mode() {
    let dir = tempfile::tempdir().unwrap();
    let mut u = SpectralField::zeros(TWO_PI, 2).unwrap();
    let z = Complex64::new(0.3, -0.4);
    u.set_coefficient([0, 1, 0], [z, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
    let path = dir.path().join("u.nscf");
    std::fs::write(&path, snapshot::to_bytes(&u)).unwrap();
    let o = nscert(&["norms", path.to_str().unwrap(), "--s", "0", "--s", "1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let values: Vec<f64> = text
        .lines()
        .map(|l| l.rsplit(" = ").next().unwrap().parse().unwrap())
        .collect();
    let expected = std::f64::consts::SQRT_2 * z.norm();
    assert_eq!(values.len(), 2);
    assert!((values[0] - expected).abs() < 1e-14);
    assert!((values[1] - expected).abs() < 1e-14);
    assert!(text.starts_with("|u|_{0,L} = "));
}

#[test]
fn stability_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base_config(dir.path(), json!({"kind": "random", "m": 3, "seed": 2, "a4_fraction": 0.5}));
    cfg["data"]["v0"] = json!({"kind": "random", "m": 3, "seed": 3, "a1_fraction": 0.1});
    cfg["constants"]["c_i"] = json!(3.0);
    cfg["solver"]["store_snapshots"] = json!(true);
    let cfg = write_config(dir.path(), &cfg);
    let out = dir.path().join("s");
    let o = nscert(&["certify", "stability", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["certificate_A1.json", "certificate_A2.json", "certificate_P1.json", "gronwall.csv", "difference.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let a1 = read(out.join("certificate_A1.json"));
    let ratio = a1["lhs"].as_f64().unwrap() / a1["rhs"].as_f64().unwrap();
    assert!((ratio - 0.1).abs() < 1e-6);

    let merged = dir.path().join("merged.json");
    let o = nscert(&[
        "report",
        out.join("certificate_A1.json").to_str().unwrap(),
        out.join("certificate_P1.json").to_str().unwrap(),
        "--out",
        merged.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let r = read(merged.clone());
    assert_eq!(r["all_passed"], true);
    assert_eq!(r["certificates"].as_array().unwrap().len(), 2);
    let index = std::fs::read_to_string(dir.path().join("merged_index.csv")).unwrap();
    assert_eq!(index.lines().count(), 3);
}

#[test]
fn aposteriori_writes_one_certificate_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let mode = json!({"kind": "modes", "m": 2, "modes": [{"k": [1, 0, 0], "u": [[0, 0], [0.01, 0], [0, 0]]}]});
    let mut cfg = base_config(dir.path(), mode);
    cfg["aposteriori"] = json!({"schedule": [2, 4]});
    let cfg = write_config(dir.path(), &cfg);
    let out = dir.path().join("c");
    let o = nscert(&["certify", "aposteriori", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("C PASS at n=2"));
    for f in ["certificate_C_n2.json", "certificate_C_n4.json", "index.csv", "residual.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
}
