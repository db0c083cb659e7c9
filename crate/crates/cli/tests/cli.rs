use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

use qlandauer::protocol::{read_sweep_table, ExperimentConfig};
use qlandauer::Error;
use qlandauer_cli::summary::{read_crossings, read_table, READOUT_HEADER};
use qlandauer_cli::{load_config, run, EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let argv = std::iter::once("qlandauer")
        .chain(args.iter().copied())
        .map(String::from);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn verify_with_defaults() {
    let (code, out, _) = invoke(&["verify"]);
    assert_eq!(code, EXIT_OK);
    let rows = read_sweep_table(out.as_bytes()).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].residual.unwrap().abs() < 1e-9);
}

#[test]
fn invalid_values_name_the_key() {
    for (args, key) in [
        (&["verify", "--nbar0", "-1"][..], "nbar0"),
        (&["verify", "--set", "init_fidelity=2"][..], "init_fidelity"),
        (&["verify", "nonsense=1"][..], "nonsense"),
        (&["verify", "--theta-c", "abc"][..], "theta_c"),
        (&["sweep-temp", "sweep_nbar_min=0"][..], "sweep_nbar_min"),
    ] {
        let (code, out, err) = invoke(args);
        assert_eq!(code, EXIT_INVALID, "{args:?}");
        assert!(err.contains(key), "{args:?}: {err}");
        assert!(out.is_empty());
    }
    assert_eq!(invoke(&["bogus"]).0, EXIT_INVALID);
    assert_eq!(invoke(&["verify", "--format", "xml"]).0, EXIT_INVALID);
    assert_eq!(invoke(&["--help"]).0, EXIT_OK);
}

#[test]
fn strict_mode_rejects_divergence() {
    let (code, _, err) = invoke(&["verify", "--nbar0", "0", "--strict"]);
    assert_eq!(code, EXIT_NUMERICAL);
    assert!(err.contains("lhs"));
    let (code, out, _) = invoke(&["verify", "--nbar0", "0"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("divergent"));
}

#[test]
fn theta_sweep_changes_sign_twice() {
    let (code, out, _) = invoke(&["sweep-theta", "--nbar0", "0.074"]);
    assert_eq!(code, EXIT_OK);
    let rows = read_sweep_table(out.as_bytes()).unwrap();
    assert_eq!(rows.len(), 49);
    let changes = rows
        .windows(2)
        .filter(|w| (w[0].delta_s > 0.0) != (w[1].delta_s > 0.0))
        .count();
    assert_eq!(changes, 2);
}

#[test]
fn temperature_sweep_table() {
    let (code, out, _) = invoke(&["sweep-temp", "sweep_nbar_points=5"]);
    assert_eq!(code, EXIT_OK);
    let rows = read_sweep_table(out.as_bytes()).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[0].temperature < w[1].temperature));
}

#[test]
fn crossings_and_readout_tables_parse() {
    let (_, out, _) = invoke(&["crossings"]);
    let x = read_crossings(&out).unwrap();
    assert!((0.49..=0.59).contains(&x.theta_low.unwrap()));
    let (code, out, _) = invoke(&["readout", "--seed", "5"]);
    assert_eq!(code, EXIT_OK);
    let rows = read_table(&out, READOUT_HEADER).unwrap();
    let stages: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(stages, ["pre", "post", "delta"]);
}

#[test]
fn structured_output_describes_itself() {
    let (code, out, _) = invoke(&["run", "--format", "structured", "--seed", "9"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["kind"], "run");
    assert_eq!(v["seed"], 9);
    assert_eq!(v["config"]["seed"], "9");
    assert!(v["result"]["ledger"]["residual"].as_f64().unwrap().abs() < 1e-9);
    assert!(v["result"]["post"]["fit"]["populations"].is_array());
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.conf");
    write(&empty, "");
    let c = load_config(Some(&empty), &[]).unwrap();
    assert_eq!(c, ExperimentConfig::default());
    assert_eq!(c.pulse.eta, 0.09);
    assert!((c.omega_z / (2.0 * PI) - 1.01).abs() < 1e-12);
    assert!((c.pulse.duration - c.pulse.pi_time()).abs() < 1e-12);

    let file = dir.path().join("run.conf");
    write(
        &file,
        "# erasure\nnbar0 = 0.2   # warmer\n\ntheta_c = 1.0\nshots=50\n",
    );
    let c = load_config(Some(&file), &[("theta_c".into(), "1.25".into())]).unwrap();
    assert_eq!((c.nbar0, c.theta_c, c.shots), (0.2, 1.25, 50));

    let bad = dir.path().join("bad.conf");
    write(&bad, "nbar0 = 0.1\n\nthis line is wrong\n");
    assert!(matches!(
        load_config(Some(&bad), &[]),
        Err(Error::Parse { line: 3, .. })
    ));
    write(&bad, "nbar0 = 0.1\nnbar1 = 2\n");
    let e = load_config(Some(&bad), &[]).unwrap_err();
    assert!(matches!(e, Error::Parse { line: 2, .. }) && e.to_string().contains("nbar1"));

    let e = load_config(None, &[("bogus".into(), "1".into())]).unwrap_err();
    assert!(e.to_string().contains("bogus"));
    assert!(load_config(Some(&dir.path().join("missing.conf")), &[]).is_err());

    let path = file.to_str().unwrap();
    let (code, out, _) = invoke(&["verify", "--config", path]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(read_sweep_table(out.as_bytes()).unwrap()[0].nbar0, 0.2);
}

#[test]
fn outputs_are_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["readout", "sweep-theta", "run"] {
        let files: Vec<Vec<u8>> = ["a", "b"]
            .iter()
            .map(|name| {
                let path = dir.path().join(format!("{cmd}-{name}.out"));
                let p = path.to_str().unwrap();
                let (code, out, _) =
                    invoke(&[cmd, "--seed", "42", "--output", p, "--format", "structured"]);
                assert_eq!(code, EXIT_OK);
                assert!(out.is_empty());
                std::fs::read(&path).unwrap()
            })
            .collect();
        assert_eq!(files[0], files[1], "{cmd}");
    }
    let seeded = |seed: &str| invoke(&["readout", "--seed", seed]).1;
    assert_ne!(seeded("1"), seeded("2"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qlandauer");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["verify"]);
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("# qlandauer"));
    let bad = status(&["verify", "--nbar0", "-1"]);
    assert_eq!(bad.status.code(), Some(EXIT_INVALID));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("nbar0"));
    assert_eq!(
        status(&["verify", "--nbar0", "0", "--strict"])
            .status
            .code(),
        Some(EXIT_NUMERICAL)
    );
}
