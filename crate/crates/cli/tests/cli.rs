use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_polyspec"));
    c.env_remove("POLYSPEC_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("polyspec-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn value(v: &Value) -> f64 {
    v["value"].as_f64().unwrap()
}

#[test]
fn constants_golden_case() {
    let o = run(&["constants", "--n", "3", "--s", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    for key in ["n", "s", "c_x1", "c_fs", "c_bl_dir", "c_bl_neu", "errors", "evals", "config"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert!((r["c_x1"].as_f64().unwrap() - 0.008063).abs() < 1e-6);
    assert_eq!(r["golden_match"], Value::Bool(true));
    assert!(r["errors"]["c_fs"].as_f64().unwrap() < 1e-10);
}

#[test]
fn constants_without_reference() {
    let o = run(&["constants", "--n", "2", "--s", "1", "--bc", "dirichlet,periodic"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert!(r.get("golden_match").is_none());
    assert_eq!(r["c_bl_per"].as_f64(), Some(0.0));
    assert_eq!(r["exact"], serde_json::json!(["c_bl_per"]));
    assert!(r["errors"]["c_x1"].as_f64().unwrap() > 0.0);
}

#[test]
fn constants_reject_s_out_of_range() {
    let o = run(&["constants", "--n", "3", "--s", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("s must lie in (0,n)"));
    assert!(o.stdout.is_empty());
}

#[test]
fn exchange_scan_fit_on_the_square() {
    let o = run(&["exchange-scan", "--fixture", "square", "--s", "1", "--lmin", "15", "--lmax", "40", "--count", "11", "--no-ctm"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    let fit = &r["fit"];
    assert_eq!(fit["records_used"], 11);
    assert!(value(&fit["A_relative_deviation"]).abs() < 0.03, "{fit}");
    assert!(value(&fit["B_relative_deviation"]).abs() < 0.15, "{fit}");
    assert_eq!(r["records"].as_array().unwrap().len(), 11);
}

#[test]
fn exchange_scan_files() {
    let dir = scratch("exchange");
    let o = run(&[
        "--out",
        dir.to_str().unwrap(),
        "exchange-scan",
        "--lmin",
        "12",
        "--lmax",
        "14",
        "--count",
        "2",
        "--samples",
        "8192",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.join("exchange-scan.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "# schema: polyspec-csv/1 exchange-scan");
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..6], &["lambda", "n_modes", "E_x", "E_x_err", "E_x_ctm", "E_x_ctm_err"]);
    assert!(header.contains(&"ctm_diag_c0") && header.contains(&"ctm_offdiag_err"));
    assert_eq!(lines.count(), 2);
    // the file report is the printed one
    let file: Value = serde_json::from_str(&fs::read_to_string(dir.join("exchange-scan.json")).unwrap()).unwrap();
    assert_eq!(file, json(&o));
    assert_eq!(file["config"]["lmax"], 14.0);
    let plot = fs::read_to_string(dir.join("exchange-scan.plot.csv")).unwrap();
    assert!(plot.lines().nth(1).unwrap().starts_with("x,y,y_err,theory"));
    let script = fs::read_to_string(dir.join("exchange-scan.plot.py")).unwrap();
    assert!(script.contains("exchange-scan.plot.csv") && script.contains("matplotlib"));
    // the continuum terms add up to the continuum total
    let rec = &file["records"][0];
    let sum: f64 = rec["ctm_terms"].as_object().unwrap().values().map(value).sum();
    assert!((sum - value(&rec["E_x_ctm"])).abs() < 1e-9 * sum.abs());
}

#[test]
fn exchange_scan_empty_grid() {
    let o = run(&["exchange-scan", "--count", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["exchange-scan", "--lmin", "20", "--lmax", "10"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn torus_theory_has_no_boundary_layer() {
    let o = run(&["exchange-scan", "--fixture", "torus", "--lmin", "10", "--lmax", "12", "--count", "2", "--samples", "4096", "--no-ctm"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["bc"], "periodic");
    assert_eq!(r["theory"]["c_bl"], serde_json::json!({ "value": 0.0, "exact": true }));
}

#[test]
fn weyl_scan_matches_the_surface_term() {
    let o = run(&["weyl-scan", "--fixture", "square", "--bc", "dirichlet", "--lmax", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["within_10_percent"], true);
    assert!((value(&r["prediction"]) + 1.0 / std::f64::consts::PI).abs() < 1e-15);
    assert_eq!(r["window"], serde_json::json!([100.0, 200.0]));
}

#[test]
fn spectral_error_and_semilocal_scans() {
    let o = run(&["spectral-error", "--lmin", "5", "--lmax", "15", "--count", "4", "--samples", "2048", "--p", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert!(r["log_slopes"]["linf"]["error"].is_number());
    assert_eq!(r["records"][0]["linf"]["estimate"], "sampled-max");
    assert!((value(&r["theory_exponents"]["linf"]) - 2.0 / 3.0).abs() < 1e-15);

    let o = run(&["semilocal-scan", "--integrand", "density", "--lmin", "10", "--lmax", "13", "--count", "4", "--no-ctm"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    for rec in r["records"].as_array().unwrap() {
        let n = rec["n_modes"].as_f64().unwrap();
        assert!((value(&rec["F"]) - 2.0 * n).abs() < 1e-6 * n);
    }
    let o = run(&["semilocal-scan", "--integrand", "gga", "--lmin", "10", "--lmax", "12", "--count", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gga_audit_reports_both_sides() {
    let o = run(&["gga-audit", "--builtin", "lda"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert!((value(&r["lhs"]) - 0.4166418410343457).abs() < 1e-9);
    assert_eq!(r["rhs"]["exact"], true);
    assert!(value(&r["defect"]).abs() > 0.1);
    assert_eq!(r["satisfied"], false);

    let dir = scratch("gga");
    let f = dir.join("fx.txt");
    fs::write(&f, "1 + 0.804 - 0.804/(1 + 0.21951*s^2/0.804)\n").unwrap();
    let o = run(&["gga-audit", "--expr-file", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(value(&json(&o)["defect"]) < 0.13);

    assert_eq!(run(&["gga-audit", "--expr", "1 + s^2"]).status.code(), Some(2));
    assert_eq!(run(&["gga-audit", "--expr", "1 +"]).status.code(), Some(1));
    assert_eq!(run(&["gga-audit"]).status.code(), Some(1));
}

#[test]
fn tessellate_check_exit_codes() {
    let dir = scratch("tess");
    let o = run(&["--out", dir.to_str().unwrap(), "tessellate-check", "--fixture", "triangle-50-60-70"]);
    assert_eq!(o.status.code(), Some(3));
    let r = json(&o);
    assert_eq!(r["status"], "violated");
    assert_eq!(r["certificate"]["witness"]["kind"], "overlap");
    assert!(String::from_utf8_lossy(&o.stderr).contains("witness"));
    assert!(dir.join("tessellate-check.plot.csv").exists());

    let o = run(&["tessellate-check", "--fixture", "equilateral-triangle"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["status"], "verified-to-radius");
    assert_eq!(run(&["tessellate-check", "--fixture", "dodecahedron"]).status.code(), Some(1));
}

#[test]
fn output_is_independent_of_thread_count() {
    let mut outs = Vec::new();
    for t in ["1", "3"] {
        let dir = scratch(&format!("threads{t}"));
        let o = bin()
            .env("POLYSPEC_THREADS", t)
            .args([
                "--out",
                dir.to_str().unwrap(),
                "exchange-scan",
                "--method",
                "qmc",
                "--lmin",
                "10",
                "--lmax",
                "12",
                "--count",
                "2",
                "--samples",
                "4096",
            ])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        outs.push((o.stdout, fs::read(dir.join("exchange-scan.csv")).unwrap()));
    }
    assert_eq!(outs[0], outs[1]);
    assert_eq!(bin().env("POLYSPEC_THREADS", "0").arg("constants").output().unwrap().status.code(), Some(1));
}

#[test]
fn config_file_overrides_flags() {
    let dir = scratch("config");
    let cfg = dir.join("run.json");
    fs::write(&cfg, r#"{"command": "weyl-scan", "lmax": 120, "bc": "neumann"}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "weyl-scan", "--lmax", "300", "--bc", "dirichlet"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["config"]["lmax"], 120.0);
    assert_eq!(r["bc"], "neumann");
    assert!(value(&r["prediction"]) > 0.0);

    fs::write(&cfg, r#"{"radius": 3}"#).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "weyl-scan"]).status.code(), Some(1));
    fs::write(&cfg, r#"{"command": "constants"}"#).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "weyl-scan"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
