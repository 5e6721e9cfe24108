use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use thermolen::eos::{StatePoint, VirialEos, GAS_CONSTANT};
use thermolen::length::isotherm_length_closed;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermolen"))
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("gas.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn ideal_length_matches_library_bit_for_bit() {
    let cfg = config("ideal.toml");
    let report = json(&["length", "--config", &cfg, "--T", "300", "--v1", "0.012", "--v2", "0.024"]);
    let eos = VirialEos::ideal(GAS_CONSTANT).unwrap();
    let expected = isotherm_length_closed(&eos, 300.0, 0.012, 0.024).unwrap();
    assert_eq!(report["length"].as_f64(), Some(expected.value));
    assert_eq!(report["work"].as_f64(), Some(expected.work));
    assert_eq!(report["method"], "closed_form");
    assert!((expected.value - 34.617_133_146_966_08).abs() < 1e-12);
}

#[test]
fn json_round_trips() {
    for args in [
        vec!["length", "--config", &config("virial3.toml"), "--T", "300", "--v1", "0.012", "--v2", "0.05"],
        vec!["metric", "--config", &config("virial2_attractive.toml"), "--T", "300", "--v", "0.02"],
        vec!["work", "--config", &config("quasi_ideal.toml"), "--T", "300", "--v1", "0.02", "--v2", "0.01"],
    ] {
        let mut full = vec!["--format", "json"];
        full.extend(args.iter().copied());
        let value: Value = serde_json::from_slice(&run(&full).stdout).unwrap();
        let again: Value = serde_json::from_str(&serde_json::to_string(&value).unwrap()).unwrap();
        assert_eq!(again, value);
    }
}

#[test]
fn empty_interval_is_zero() {
    for method in ["auto", "closed", "quadrature", "theorem-work", "theorem-sum"] {
        let cfg = config("virial2_repulsive.toml");
        let r = json(&["length", "--config", &cfg, "--T", "300", "--v1", "0.02", "--v2", "0.02", "--method", method]);
        assert_eq!(r["length"].as_f64(), Some(0.0), "{method}");
        assert_eq!(r["work"].as_f64(), Some(0.0), "{method}");
    }
}

#[test]
fn spec_method_names_are_accepted() {
    let cfg = config("virial3.toml");
    let a =
        json(&["length", "--config", &cfg, "--T", "300", "--v1", "0.012", "--v2", "0.024", "--method", "theorem35"]);
    let b =
        json(&["length", "--config", &cfg, "--T", "300", "--v1", "0.012", "--v2", "0.024", "--method", "theorem36"]);
    assert_eq!(a["method"], "theorem_decomposition");
    assert_eq!(b["decomposition"].as_array().unwrap().len(), 3);
    let rel = (a["length"].as_f64().unwrap() / b["length"].as_f64().unwrap() - 1.0).abs();
    assert!(rel < 1e-10);
}

#[test]
fn reversed_interval_reports_orientation() {
    let cfg = config("virial2_attractive.toml");
    let f = json(&["length", "--config", &cfg, "--T", "300", "--v1", "0.012", "--v2", "0.03"]);
    let r = json(&["length", "--config", &cfg, "--T", "300", "--v1", "0.03", "--v2", "0.012"]);
    assert_eq!(f["length"], r["length"]);
    assert_eq!(f["work"].as_f64().unwrap(), -r["work"].as_f64().unwrap());
    assert_eq!(r["orientation"], "reversed");
}

#[test]
fn metric_reports_lorentzian_and_small_residuals() {
    let r = json(&["metric", "--config", &config("ideal.toml"), "--T", "300", "--v", "0.02", "--dT", "0", "--dv", "1"]);
    assert_eq!(r["signature"], "lorentzian");
    assert!(r["lambda1"].as_f64().unwrap() < 0.0 && r["lambda2"].as_f64().unwrap() > 0.0);
    for (k, v) in r["residuals"].as_object().unwrap() {
        assert!(v.as_f64().unwrap() <= 1e-12, "{k} = {v}");
    }
    assert_eq!(r["vector"]["character"], "volume_like");

    let human =
        String::from_utf8(run(&["metric", "--config", &config("ideal.toml"), "--T", "300", "--v", "0.02"]).stdout)
            .unwrap();
    assert!(human.contains("signature:") && human.contains("lorentzian"));
    assert!(human.contains("lambda1:") && human.contains("-0.0692833"));
}

#[test]
fn classify_follows_null_slopes() {
    let cfg = config("virial2_repulsive.toml");
    let m = json(&["metric", "--config", &cfg, "--T", "300", "--v", "0.02"]);
    let slopes = m["null_slopes"].as_array().unwrap();
    for s in slopes {
        let dv = s.as_f64().unwrap().to_string();
        let c = json(&["classify", "--config", &cfg, "--T", "300", "--v", "0.02", "--dT", "1", "--dv", &dv]);
        assert_eq!(c["vector"]["character"], "null_like");
    }
    let c = json(&["classify", "--config", &cfg, "--T", "300", "--v", "0.02", "--dT", "1", "--dv", "0"]);
    assert_eq!(c["vector"]["character"], "temperature_like");
}

#[test]
fn work_is_antisymmetric_through_cli() {
    let cfg = config("virial3.toml");
    let a = json(&["work", "--config", &cfg, "--T", "250", "--v1", "0.01", "--v2", "0.07"]);
    let b = json(&["work", "--config", &cfg, "--T", "250", "--v1", "0.07", "--v2", "0.01"]);
    assert_eq!(a["work"].as_f64().unwrap(), -b["work"].as_f64().unwrap());
    assert_eq!(a["helmholtz_change"].as_f64().unwrap(), -a["work"].as_f64().unwrap());
}

#[test]
fn sweep_csv_shape_and_columns() {
    let cfg = config("virial2_attractive.toml");
    let out = run(&["sweep", "--config", &cfg, "--T", "300", "--vmin", "0.012", "--vmax", "0.06", "--steps", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.ends_with('\n') && !text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "v,p,dp_dv,integrand,L_cumulative,W_cumulative");
    assert_eq!(lines.len(), 42);
    let eos = VirialEos::virial(GAS_CONSTANT, vec![-1e-4]).unwrap();
    let mut prev_l = -1.0;
    for (i, line) in lines[1..].iter().enumerate() {
        assert!(!line.ends_with(','));
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 6);
        let s = StatePoint::new(300.0, cols[0]).unwrap();
        assert_eq!(cols[1], eos.pressure(s).unwrap());
        assert_eq!(cols[2], eos.dp_dv(s).unwrap());
        assert_eq!(cols[3], (-cols[2]).sqrt());
        assert_eq!(cols[5], eos.work(300.0, 0.012, cols[0]).unwrap());
        assert!(cols[4] > prev_l);
        prev_l = cols[4];
        if i == 0 {
            assert_eq!((cols[4], cols[5]), (0.0, 0.0));
        }
    }
    assert_eq!(lines.last().unwrap().split(',').next().unwrap().parse::<f64>().unwrap(), 0.06);
}

#[test]
fn sweep_out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sweep.csv");
    let cfg = config("quasi_ideal.toml");
    let args = ["sweep", "--config", &cfg, "--T", "500", "--vmin", "0.001", "--vmax", "0.1", "--steps", "17"];
    let stdout = run(&args).stdout;
    let mut with_out = args.to_vec();
    with_out.extend(["--out", file.to_str().unwrap()]);
    let out = run(&with_out);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&file).unwrap(), stdout);
}

#[test]
fn verify_flags_exit_five() {
    let dir = tempfile::tempdir().unwrap();
    // A single Kronrod panel cannot meet the identity tolerances on wide intervals.
    let cfg = write_config(dir.path(), "model = \"virial\"\n[tolerances]\nquad_rel_tol = 0.5\nquad_abs_tol = 1.0\n");
    let out = run(&["--format", "json", "verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(5));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["flag"].as_u64().unwrap() > 0);
    assert_eq!(report["flags_only_third_order"], false);
}

#[test]
fn verify_custom_grid() {
    let r = json(&["verify", "--config", &config("virial3.toml"), "--grid", "T=150;v=0.01:0.02,0.02:0.5"]);
    let rows = r["rows"].as_array().unwrap();
    assert!(rows.iter().all(|row| row["temperature"] == 150.0 && row["verdict"] == "PASS"));
    assert!(rows.iter().any(|row| row["formula"] == "virial3-closed"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ideal = config("ideal.toml");
    let code = |args: &[&str]| run(args).status.code();

    // Usage and configuration errors.
    assert_eq!(code(&["length", "--config", &ideal, "--T", "300", "--v1", "0.01"]), Some(2));
    assert_eq!(
        code(&["length", "--config", "/nonexistent.toml", "--T", "300", "--v1", "0.01", "--v2", "0.02"]),
        Some(2)
    );
    let unknown = write_config(dir.path(), "model = \"virial\"\ncolor = \"blue\"\n");
    assert_eq!(code(&["length", "--config", &unknown, "--T", "300", "--v1", "0.01", "--v2", "0.02"]), Some(2));
    assert_eq!(
        code(&["length", "--config", &ideal, "--T", "300", "--v1", "0.01", "--v2", "0.02", "--method", "magic"]),
        Some(2)
    );
    assert_eq!(
        code(&["sweep", "--config", &ideal, "--T", "300", "--vmin", "0.02", "--vmax", "0.01", "--steps", "4"]),
        Some(2)
    );
    assert_eq!(
        code(&["metric", "--config", &config("virial3.toml"), "--T", "300", "--v", "0.02", "--dT", "0", "--dv", "0"]),
        Some(2)
    );
    let order4 = write_config(dir.path(), "model = \"virial\"\ncoefficients = [1e-4, 1e-8, 1e-12]\n");
    assert_eq!(
        code(&["length", "--config", &order4, "--T", "300", "--v1", "0.01", "--v2", "0.02", "--method", "closed"]),
        Some(2)
    );
    assert_eq!(code(&["length", "--config", &order4, "--T", "300", "--v1", "0.01", "--v2", "0.02"]), Some(0));
    let no_slopes = write_config(dir.path(), "model = \"virial\"\ncoefficients = [1e-4]\n");
    assert_eq!(code(&["metric", "--config", &no_slopes, "--T", "300", "--v", "0.02"]), Some(2));

    // Stability and domain errors.
    let unstable = config("virial2_attractive.toml");
    let out =
        run(&["length", "--config", &unstable, "--T", "300", "--v1", "1e-4", "--v2", "1e-3", "--method", "closed"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[0.0001, 0.0002]"));
    assert_eq!(code(&["metric", "--config", &unstable, "--T", "300", "--v", "1.5e-4"]), Some(3));
    assert_eq!(
        code(&["sweep", "--config", &unstable, "--T", "300", "--vmin", "1e-4", "--vmax", "1e-3", "--steps", "4"]),
        Some(3)
    );
    assert_eq!(code(&["work", "--config", &ideal, "--T", "300", "--v1", "-0.01", "--v2", "0.02"]), Some(3));

    // Numerical failure.
    let starved = write_config(
        dir.path(),
        "model = \"virial\"\n[tolerances]\nquad_rel_tol = 1e-15\nquad_abs_tol = 1e-300\nquad_max_depth = 2\n",
    );
    assert_eq!(
        code(&["length", "--config", &starved, "--T", "300", "--v1", "0.001", "--v2", "10", "--method", "quadrature"]),
        Some(4)
    );
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let cfg = config("virial3.toml");
    for args in [
        vec!["verify", "--config", &cfg],
        vec!["metric", "--config", &cfg, "--T", "400", "--v", "0.003"],
        vec!["length", "--config", &cfg, "--T", "400", "--v1", "0.003", "--v2", "0.3", "--method", "quadrature"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.status.code(), b.status.code());
    }
}
