use std::f64::consts::PI;
use std::process::Command;

use frac_rabi::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("frac-rabi").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = call(args);
    assert_eq!(code, 0, "{args:?} failed: {err}");
    out
}

/// Data rows of a CSV document as (header, rows of strings).
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# frac-rabi v1; t in units of 1/omega"));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

fn summary_value(text: &str, key: &str) -> Vec<f64> {
    text.lines()
        .filter(|l| l.starts_with("# summary"))
        .map(|l| {
            let kv = l.split_whitespace().find(|w| w.starts_with(&format!("{key}="))).unwrap();
            f(&kv[key.len() + 1..])
        })
        .collect()
}

#[test]
fn ml_closed_form_taylor_and_asymptotic() {
    let pi = PI.to_string();
    let (h, r) = csv(&ok(&["ml", "--alpha", "1", "--beta", "1", "--z-re", "0", "--z-im", &pi]));
    assert!((f(&r[0][col(&h, "re")]) + 1.0).abs() < 1e-15 && f(&r[0][col(&h, "im")]).abs() < 1e-15);
    assert_eq!(r[0][col(&h, "regime")], "closed-form");

    let (h, r) = csv(&ok(&["ml", "--alpha", "0.5", "--beta", "1", "--z-re", "1", "--z-im", "0"]));
    assert!((f(&r[0][col(&h, "re")]) - 5.00898008076).abs() < 1e-10);
    assert_eq!(r[0][col(&h, "regime")], "taylor");

    let (h, r) = csv(&ok(&["ml", "--alpha", "0.7", "--beta", "0.7", "--z-re", "0", "--z-im", "-2000"]));
    assert_eq!(r[0][col(&h, "regime")], "asymptotic");
}

#[test]
fn static_order_one_and_polar_start() {
    let t = (PI / 2.0).to_string();
    let (h, r) = csv(&ok(&["static", "--alpha", "1", "--t-max", &t, "--n-points", "2"]));
    let last = &r[1];
    assert!((f(&last[col(&h, "sx")]) + 1.0).abs() < 1e-12 && f(&last[col(&h, "sy")]).abs() < 1e-12);

    let (h, r) = csv(&ok(&["static", "--theta", "0", "--alpha", "0.3,0.7", "--n-points", "9"]));
    assert_eq!(r.len(), 18);
    for row in &r {
        assert_eq!((f(&row[col(&h, "sz")]), f(&row[col(&h, "sx")]), f(&row[col(&h, "sy")])), (1.0, 0.0, 0.0));
    }
}

#[test]
fn default_grid_shape() {
    let (h, r) = csv(&ok(&["static"]));
    assert_eq!(h, ["alpha", "t", "sx", "sy", "sz"]);
    assert_eq!(r.len(), 9 * 801);
    assert_eq!((r[0][0].as_str(), r[0][1].as_str()), ("0.2", "0"));
    assert_eq!((r[9 * 801 - 1][0].as_str(), r[9 * 801 - 1][1].as_str()), ("1", "20"));
}

#[test]
fn driven_starts_at_one_and_reduces_to_static_without_drive() {
    let (h, r) = csv(&ok(&["driven", "--alpha", "0.6,0.9", "--n-points", "11", "--t-max", "5"]));
    assert_eq!(h, ["alpha", "t", "sx", "sy", "sz", "A", "F"]);
    assert_eq!((f(&r[0][col(&h, "A")]), f(&r[0][col(&h, "F")])), (1.0, 1.0));

    let args = ["--alpha", "0.6,0.9", "--n-points", "11", "--t-max", "5", "--theta", "1"];
    let (_, s) = csv(&ok(&[&["static"][..], &args[..]].concat()));
    let (hd, d) = csv(&ok(&[&["driven", "--lambda", "0"][..], &args[..]].concat()));
    for (a, b) in s.iter().zip(&d) {
        for c in ["sx", "sy", "sz"] {
            assert!((f(&a[col(&hd, c)]) - f(&b[col(&hd, c)])).abs() < 1e-10, "{c}");
        }
    }
}

#[test]
fn driven_check_mode_and_resonant_fidelity() {
    ok(&["driven", "--alpha", "0.5,1", "--n-points", "6", "--t-max", "10", "--check"]);
    let (h, r) = csv(&ok(&[
        "driven", "--alpha", "0.8", "--lambda", "0.01", "--omega-drive", "2", "--outputs", "F,F_res", "--n-points", "5",
        "--t-max", "4",
    ]));
    assert_eq!(h, ["alpha", "t", "F", "F_res"]);
    for row in &r {
        assert!((f(&row[2]) - f(&row[3])).abs() < 1e-2);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["driven", "--alpha", "0.4,0.7,1", "--n-points", "31", "--t-max", "12"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn json_mirrors_rows() {
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["driven", "--alpha", "0.8", "--n-points", "4", "--format", "json"])).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["alpha", "t", "sx", "sy", "sz", "A", "F"]);
}

#[test]
fn oracle_summaries() {
    let out = ok(&[
        "oracle", "--hamiltonian", "static", "--alpha", "0.8", "--n-steps", "4096", "--t-max", "10", "--n-points", "11",
    ]);
    assert!(summary_value(&out, "max_dev")[0] <= 1e-4);
    let (_, r) = csv(&out);
    assert_eq!(r.len(), 11);

    let t = (2.0 * PI).to_string();
    let out = ok(&["oracle", "--alpha", "1", "--n-steps", "8192", "--t-max", &t, "--n-points", "2", "--check"]);
    assert!(summary_value(&out, "max_dev")[0] <= 1e-6);

    let out = ok(&["oracle", "--hamiltonian", "static", "--alpha", "0.8", "--n-steps", "32", "--n-points", "2"]);
    assert!(summary_value(&out, "est_order")[0] >= 0.9);

    let v: serde_json::Value = serde_json::from_str(&ok(&[
        "oracle", "--alpha", "0.8", "--n-steps", "256", "--t-max", "5", "--n-points", "3", "--format", "json",
    ]))
    .unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["summary"][0]["reference"], "leading_order");
    assert!(v["summary"][0]["scaling_ratio"].as_f64().unwrap() > 1.0);
}

#[test]
fn config_file_and_flag_override() {
    let dir = std::env::temp_dir().join(format!("frac-rabi-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# sweep\nalpha=0.6,0.8\nn_points=3\nt_max=2\noutputs=sz\n").unwrap();
    let c = cfg.to_str().unwrap();
    let (h, r) = csv(&ok(&["static", "--config", c]));
    assert_eq!(h, ["alpha", "t", "sz"]);
    assert_eq!(r.len(), 6);
    let (_, r) = csv(&ok(&["static", "--config", c, "--alpha", "0.5", "--n-points", "4"]));
    assert_eq!(r.len(), 4);
    assert_eq!(r[3][1], "2");

    let out_path = dir.join("rows.csv");
    let o = out_path.to_str().unwrap();
    assert_eq!(ok(&["static", "--config", c, "--out", o]), "");
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), ok(&["static", "--config", c]));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["static", "--alpha", "1.2"]).0, 1);
    assert_eq!(call(&["static", "--n-points", "1"]).0, 1);
    assert_eq!(call(&["static", "--outputs", "F"]).0, 1);
    assert_eq!(call(&["driven", "--outputs", "F_res"]).0, 1);
    assert_eq!(call(&["static", "--config", "/nonexistent/frac.cfg"]).0, 1);
    assert_eq!(call(&["frobnicate"]).0, 1);
    assert_eq!(call(&["--help"]).0, 0);
    let (code, _, err) = call(&["ml", "--alpha", "0.2", "--z-re", "60"]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("overflows"));
}

#[test]
fn check_subset_passes() {
    let (h, r) = csv(&ok(&["check", "--only", "2,10"]));
    assert_eq!(r.len(), 2);
    assert!(r.iter().all(|row| row[col(&h, "passed")] == "true"));
    assert_eq!(call(&["check", "--only", "11"]).0, 1);
}

#[test]
fn binary_reads_config_from_environment() {
    let dir = std::env::temp_dir().join(format!("frac-rabi-env-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("env.cfg");
    std::fs::write(&cfg, "alpha=0.9\nn_points=2\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_frac-rabi"))
        .args(["static"])
        .env("FRAC_RABI_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv(&String::from_utf8(out.stdout).unwrap()).1.len(), 2);

    let out = Command::new(env!("CARGO_BIN_EXE_frac-rabi")).args(["static", "--alpha", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("fractional order"));
    std::fs::remove_dir_all(&dir).unwrap();
}
