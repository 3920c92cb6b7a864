use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("anticross-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn file(name: &str, contents: &str) -> PathBuf {
    let p = dir().join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn anticross(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anticross"))
        .args(args)
        .env_remove("ANTICROSS_THREADS")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const PERT: &str = r#"{"type":"perturbation","params":{"omega":0,"delta":1,"epsilon":1,"phi":0.7853981633974483},"domain":[-3,3]}"#;
const LINEAR: &str = r#"{"type":"custom-table","params":{"lambda":[-5,0,5],"omega0":[0,0,0],"delta":[1,1,1],"gamma":[-5,0,5]}}"#;

/// Header comments and a parsed table of the CSV body.
fn parse_csv(bytes: &[u8]) -> (Vec<String>, Vec<String>, Vec<Vec<String>>) {
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let comments: Vec<String> = text.lines().take_while(|l| l.starts_with('#')).map(String::from).collect();
    let body: String = text.lines().skip(comments.len()).map(|l| format!("{l}\n")).collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (comments, header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<Option<f64>> {
    let k = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| if r[k].is_empty() { None } else { Some(r[k].parse().unwrap()) }).collect()
}

#[test]
fn qfi_scan_peaks_at_zero_and_records_metadata() {
    let model = file("pert.json", PERT);
    let out = anticross(&["qfi-scan", "--model", path(&model), "--range", "-3:3", "--steps", "601", "--seed", "11"]);
    assert!(out.status.success());
    let (comments, header, rows) = parse_csv(&out.stdout);
    assert_eq!(rows.len(), 601);
    for key in ["# tool:", "# version:", "# model:", "# delta_convention:", "# seed: 11"] {
        assert!(comments.iter().any(|c| c.starts_with(key)), "{key}");
    }
    let lambda = column(&header, &rows, "lambda");
    let h = column(&header, &rows, "H_qfi");
    let oracle = column(&header, &rows, "H_fidelity_oracle");
    let printed = column(&header, &rows, "H_paper_printed");
    let peak = (0..601).max_by(|&a, &b| h[a].unwrap().total_cmp(&h[b].unwrap())).unwrap();
    assert_eq!(lambda[peak], Some(0.0));
    for k in 1..600 {
        let (a, b) = (h[k].unwrap(), oracle[k].unwrap());
        assert!((a - b).abs() <= 1e-5 * a);
    }
    assert!(printed.iter().all(Option::is_some));
    // endpoints have no room for the oracle stencil
    assert_eq!(oracle[0], None);
}

#[test]
fn commuting_scan_has_zero_information() {
    let model = file(
        "commuting.json",
        r#"{"type":"perturbation","params":{"omega":0,"delta":1,"epsilon":1,"phi":0},"domain":[-3,3]}"#,
    );
    let out = anticross(&["qfi-scan", "--model", path(&model), "--range", "-3:3", "--steps", "601"]);
    assert!(out.status.success());
    let (_, header, rows) = parse_csv(&out.stdout);
    let h = column(&header, &rows, "H_qfi");
    let flags = &header.iter().position(|c| c == "flag").unwrap();
    for (k, v) in h.iter().enumerate() {
        match v {
            Some(v) => assert_eq!(*v, 0.0),
            // λ = −δ/ε is an exact crossing
            None => assert!(rows[k][*flags].contains("degenerate")),
        }
    }
    assert_eq!(h.iter().filter(|v| v.is_none()).count(), 1);
}

#[test]
fn csv_values_round_trip() {
    let model = file("pert-rt.json", PERT);
    let out = anticross(&["qfi-scan", "--model", path(&model), "--range", "-1:1", "--steps", "7"]);
    let (_, header, rows) = parse_csv(&out.stdout);
    let k = header.iter().position(|h| h == "lambda").unwrap();
    let values: Vec<f64> = rows.iter().map(|r| r[k].parse().unwrap()).collect();
    let expected: Vec<f64> = (0..7).map(|i| if i == 6 { 1.0 } else { -1.0 + 2.0 * i as f64 / 6.0 }).collect();
    assert_eq!(values, expected);
    for r in &rows {
        for cell in r.iter().filter(|c| !c.is_empty() && c.contains('e')) {
            let v: f64 = cell.parse().unwrap();
            assert_eq!(format!("{v:.16e}"), *cell);
        }
    }
}

#[test]
fn phi_and_theta_scans() {
    let model = file("pert-phi.json", PERT);
    let out = anticross(&[
        "qfi-scan", "--model", path(&model), "--var", "phi", "--lambda", "0", "--range", "0:1.5", "--steps", "151",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, header, rows) = parse_csv(&out.stdout);
    let phi = column(&header, &rows, "phi");
    let h = column(&header, &rows, "H_qfi");
    let peak = (0..rows.len()).max_by(|&a, &b| h[a].unwrap().total_cmp(&h[b].unwrap())).unwrap();
    assert!((phi[peak].unwrap() - std::f64::consts::FRAC_PI_4).abs() <= 0.01);

    let out = anticross(&["qfi-scan", "--model", path(&model), "--var", "theta", "--lambda", "0.5", "--steps", "64"]);
    assert!(out.status.success());
    let (_, header, rows) = parse_csv(&out.stdout);
    for g in column(&header, &rows, "g").into_iter().flatten() {
        assert!((g - 1.0).abs() < 1e-12);
    }

    let missing = anticross(&["qfi-scan", "--model", path(&model), "--var", "phi", "--range", "0:1"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn g_surface_properties() {
    let out = anticross(&["g-surface", "--x", "0.1,10,0.01", "--grid", "41"]);
    assert!(out.status.success());
    let (_, header, rows) = parse_csv(&out.stdout);
    let col = |n| column(&header, &rows, n);
    let (x, r1, r3, g) = (col("x"), col("r1"), col("r3"), col("g"));
    let mut a = std::collections::HashMap::new();
    for k in 0..rows.len() {
        let (xv, p, q) = (x[k].unwrap(), r1[k].unwrap(), r3[k].unwrap());
        assert!(p * p + q * q <= 1.0 + 1e-12);
        if p == 0.0 && q == 0.0 {
            assert_eq!(g[k], Some(0.0));
        }
        let on_circle = (p * p + q * q - 1.0).abs() < 1e-12;
        if xv == 0.01 && on_circle {
            if let Some(v) = g[k] {
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
        a.insert((xv.to_bits(), p.to_bits(), q.to_bits()), g[k]);
    }
    for ((xb, p, q), v) in &a {
        if f64::from_bits(*xb) == 10.0 {
            let swapped = a[&(0.1f64.to_bits(), *q, *p)];
            match (v, swapped) {
                (Some(u), Some(w)) => assert!((u - w).abs() < 1e-12),
                (None, None) => {}
                other => panic!("{other:?}"),
            }
        }
    }
    assert_eq!(anticross(&["g-surface", "--grid", "8"]).status.code(), Some(2));
}

#[test]
fn thermal_scan_writes_summary() {
    let model = file("pert-th.json", PERT);
    let out_path = dir().join("thermal.csv");
    let out = anticross(&[
        "thermal-scan", "--model", path(&model), "--lambda", "0.5", "--range", "0:1e-3", "--steps", "21",
        "--out", path(&out_path),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, header, rows) = parse_csv(&std::fs::read(&out_path).unwrap());
    for name in ["H_classical", "H_quantum", "H_total", "k_C", "k_Q", "F_beta"] {
        assert_eq!(column(&header, &rows, name)[0], Some(0.0), "{name}");
    }
    assert_eq!(column(&header, &rows, "purity")[0], Some(0.5));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir().join("thermal.csv.summary.json")).unwrap()).unwrap();
    assert!(summary["small_beta"]["relative_error_H"].as_f64().unwrap() < 0.01);
    assert!(summary["small_beta"]["relative_error_F"].as_f64().unwrap() < 0.01);

    let out = anticross(&[
        "thermal-scan", "--model", path(&model), "--lambda", "0.5", "--range", "30:80", "--steps", "5",
        "--format", "json",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cols: Vec<&str> = doc["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    let it = cols.iter().position(|c| *c == "H_total").unwrap();
    for row in doc["rows"].as_array().unwrap() {
        let ratio = row[it].as_f64().unwrap() / 0.64;
        assert!((1.0 - 1e-6..=1.0 + 1e-9).contains(&ratio), "{ratio}");
    }
}

#[test]
fn thermal_scan_transverse_model_matches_qfi_at_high_temperature() {
    // ∂Δ = 0: measuring σ1 is optimal in the small-β limit
    let model = file("linear-th.json", LINEAR);
    let summary = dir().join("lin-summary.json");
    let out = anticross(&[
        "thermal-scan", "--model", path(&model), "--lambda", "0.7", "--range", "1e-4:1e-2", "--steps", "30",
        "--log", "--direction", "1,0,0", "--summary", path(&summary),
    ]);
    assert!(out.status.success());
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    let ratio = s["small_beta"]["F_over_H"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
}

#[test]
fn estimate_reports_and_exit_codes() {
    let model = file("linear.json", LINEAR);
    let run = |extra: &[&str]| {
        let mut args = vec!["estimate", "--model", path(&model), "--lambda-true", "1"];
        args.extend(extra);
        anticross(&args)
    };
    let out = run(&["--shots", "10000", "--batches", "500", "--seed", "3"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ratio = doc["variance_to_quantum_crb"].as_f64().unwrap();
    assert!((0.8..=1.25).contains(&ratio), "{ratio}");
    assert_eq!(doc["metadata"]["seed"], 3);
    assert_eq!(doc["report"]["estimates"].as_array().unwrap().len(), 500);
    assert_eq!(out.stdout, run(&["--shots", "10000", "--batches", "500", "--seed", "3"]).stdout);

    assert_eq!(run(&["--direction", "sigma2"]).status.code(), Some(3));
    assert_eq!(run(&["--direction", "0,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["--grid-points", "10"]).status.code(), Some(2));

    let csv_out = run(&["--batches", "20", "--shots", "100", "--format", "csv"]);
    let (_, header, rows) = parse_csv(&csv_out.stdout);
    assert_eq!(header, ["batch", "estimate", "flag"]);
    assert_eq!(rows.len(), 20);
}

#[test]
fn error_exit_codes() {
    let missing = dir().join("does-not-exist.json");
    assert_eq!(anticross(&["model-validate", "--model", path(&missing)]).status.code(), Some(4));

    let bad = file("bad.json", "{\n  \"type\": \"rabi\",\n  \"params\": {\"omega0\": 1}\n}");
    let out = anticross(&["model-validate", "--model", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("omega") && err.contains("line 4"), "{err}");

    let model = file("pert-out.json", PERT);
    let unwritable = dir().join("no-such-dir").join("out.csv");
    let out = anticross(&["qfi-scan", "--model", path(&model), "--out", path(&unwritable)]);
    assert_eq!(out.status.code(), Some(4));

    let out = Command::new(env!("CARGO_BIN_EXE_anticross"))
        .args(["g-surface"])
        .env("ANTICROSS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn model_validate_reports_warnings() {
    let rabi = file("rabi.json", r#"{"type":"rabi","params":{"omega0":1,"omega":1,"delta_convention":"matrix"},"domain":[0,4]}"#);
    let out = anticross(&["model-validate", "--model", path(&rabi)]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["metadata"]["delta_convention"], "matrix");
    // Δ = 1 − λ/2 turns negative past λ = 2
    assert_eq!(doc["warnings"][0]["kind"], "non-positive-delta");

    let pert = file("pert-ok.json", PERT);
    let doc: serde_json::Value =
        serde_json::from_slice(&anticross(&["model-validate", "--model", path(&pert)]).stdout).unwrap();
    assert_eq!(doc["ok"], true);
}
