//! End-to-end runs of the `qcs` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qcs"))
}

fn spec(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qcs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output {
        status,
        stdout,
        stderr,
    } = cmd.output().unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn json_field(text: &str, key: &str) -> f64 {
    let v: serde_json::Value = serde_json::from_str(text).unwrap();
    v[key].as_f64().unwrap()
}

#[test]
fn qcs_command_reports() {
    let vac = spec("vacuum.json", r#"{"schema": 1, "type": "vacuum"}"#);
    let (code, out, _) = run(bin().arg("qcs").arg(&vac));
    assert_eq!(code, 0);
    assert!((json_field(&out, "qcs_squared") - 1.0).abs() < 1e-14);
    assert!((json_field(&out, "purity") - 1.0).abs() < 1e-14);

    let cat = spec("cat.json", r#"{"schema": 1, "type": "cat", "alpha": 2.0}"#);
    let (code, out, _) = run(bin().arg("qcs").arg(&cat));
    assert_eq!(code, 0);
    assert!((json_field(&out, "qcs_squared") - 8.9946).abs() < 1e-4);

    let lossy = spec(
        "lossy.json",
        r#"{"schema": 1, "type": "cat", "alpha": 2.0, "channels": [{"type": "loss", "eta": 0.5}]}"#,
    );
    let (code, out, _) = run(bin().arg("qcs").arg(&lossy));
    assert_eq!(code, 0);
    assert!((json_field(&out, "qcs_squared") - 1.0).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    let malformed = spec("bad.json", r#"{"type": "cat", "alpha": }"#);
    assert_eq!(run(bin().arg("qcs").arg(&malformed)).0, 1);
    let unknown = spec(
        "unknown.json",
        r#"{"type": "cat", "alpha": 1, "colour": 3}"#,
    );
    assert_eq!(run(bin().arg("qcs").arg(&unknown)).0, 1);
    let eta = spec(
        "eta.json",
        r#"{"type": "vacuum", "channels": [{"type": "loss", "eta": 0}]}"#,
    );
    assert_eq!(run(bin().arg("qcs").arg(&eta)).0, 1);

    // Not closed under conjugation.
    let odd = spec(
        "odd.json",
        r#"{"type": "custom", "n_modes": 1, "terms": [
            {"coeff": [0.0, 1.0], "mean": [0.0, 0.0], "cov": [[0.5, 0.0], [0.0, 0.5]]}]}"#,
    );
    let (code, out, _) = run(bin().arg("qcs").arg(&odd));
    assert_eq!(code, 2);
    assert!(out.contains("hermiticity_residual"));

    // Two identical terms: the pair sum matrix is fine, but a singular
    // covariance is a numerical failure.
    let singular = spec(
        "singular.json",
        r#"{"type": "custom", "n_modes": 1, "terms": [
            {"coeff": 1.0, "mean": [0.0, 0.0], "cov": [[0.0, 0.0], [0.0, 0.0]]}]}"#,
    );
    assert_eq!(run(bin().arg("qcs").arg(&singular)).0, 3);

    let gkp = spec("gkp.json", r#"{"type": "gkp", "epsilon": 0.1}"#);
    let (code, _, err) = run(bin().arg("qcs").arg(&gkp).env("QCS_MAX_TERMS", "50"));
    assert_eq!(code, 1);
    assert!(err.contains("cap"));

    let cat = spec("cat.json", r#"{"type": "cat", "alpha": 1.0}"#);
    assert_eq!(
        run(bin()
            .args(["sweep"])
            .arg(&cat)
            .args(["--param", "zeta", "--from", "0", "--to", "1", "--steps", "3"]))
        .0,
        1
    );
    assert_eq!(run(bin().arg("frobnicate")).0, 1);
}

#[test]
fn sweep_is_deterministic() {
    let cat = spec(
        "sweep.json",
        r#"{"schema": 1, "type": "cat", "alpha": 2.0}"#,
    );
    let args = [
        "--param", "eta", "--from", "1", "--to", "0.3", "--steps", "8",
    ];
    let (c1, a, _) = run(bin().arg("sweep").arg(&cat).args(args));
    let (c2, b, _) = run(bin().arg("sweep").arg(&cat).args(args));
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert!(a.starts_with("eta,qcs_squared,purity\n"));
    assert_eq!(a.lines().count(), 9);
    assert!(!a.contains('\r'));
    let first = a.lines().nth(1).unwrap();
    assert_eq!(first.split(',').next().unwrap(), "1.0000000000000000e0");

    let out = std::env::temp_dir().join(format!("qcs-cli-{}/neg.csv", std::process::id()));
    let (code, stdout, _) = run(bin()
        .arg("sweep")
        .arg(&cat)
        .args([
            "--param",
            "eta",
            "--from",
            "1",
            "--to",
            "0.5",
            "--steps",
            "2",
            "--negativity",
            "--out",
        ])
        .arg(&out));
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("eta,qcs_squared,purity,negativity\n"));
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!(last[3].abs() < 1e-6);
}

#[test]
fn breed_command() {
    let r = -(0.2f64.ln());
    let (code, out, _) = run(bin().args([
        "breed",
        "--r",
        &r.to_string(),
        "--rounds",
        "4",
        "--protocol",
        "slow",
    ]));
    assert_eq!(code, 0);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    for pair in rows.windows(2) {
        assert!(pair[1][2] > pair[0][2]);
    }
    assert_eq!(rows[4][4], 36.0);

    let (code, _, _) = run(bin()
        .args([
            "breed",
            "--r",
            "1",
            "--rounds",
            "6",
            "--protocol",
            "efficient",
        ])
        .env("QCS_MAX_TERMS", "1000"));
    assert_eq!(code, 1);
}

#[test]
fn wigner_command() {
    let vac = spec("wvac.json", r#"{"type": "vacuum"}"#);
    let (code, out, _) = run(bin().arg("wigner").arg(&vac).args(["--points", "101"]));
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1 + 101 * 101);
    let peak = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .fold(f64::MIN, f64::max);
    assert!((peak - 1.0 / std::f64::consts::PI).abs() < 1e-12);

    let lossy = spec(
        "wlossy.json",
        r#"{"type": "cat", "alpha": 2.0, "channels": [{"type": "loss", "eta": 0.5}]}"#,
    );
    let (code, out, _) = run(bin().arg("wigner").arg(&lossy).args(["--section", "p=0"]));
    assert_eq!(code, 0);
    let min = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .fold(f64::MAX, f64::min);
    assert!(min >= -1e-9);
    assert_eq!(
        run(bin().arg("wigner").arg(&vac).args(["--section", "q=1"])).0,
        1
    );
}
