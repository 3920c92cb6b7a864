//! Subcommand implementations. Grid points are evaluated in parallel and
//! written in grid order.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use anticross::config::{ModelConfig, ModelSpec};
use anticross::estimate::{run_experiment, EstimatorConfig};
use anticross::hamiltonian::{
    eigenvalues, purity, thermal_state, validate_model, CoefficientBundle, DerivativeBundle, Domain,
    ModelWarning, TwoLevelModel,
};
use anticross::metrology::{
    fisher_projective, g_function, optimal_direction_high_t, qfi_fidelity_oracle_default, qfi_ground,
    ratio_directions, thermal_fisher, thermal_qfi, MeasurementDirection,
};
use anticross::zoo::{perturbation_qfi_printed, rabi_qfi_printed};
use anticross::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{EstimateArgs, GSurfaceArgs, ModelValidateArgs, QfiScanArgs, ScanVar, ThermalScanArgs};
use crate::error::CliError;
use crate::output::{emit, number, pretty, Cell, Format, Metadata, Table};

/// A parsed model file together with the model it builds.
pub struct LoadedModel {
    pub config: ModelConfig,
    pub model: Box<dyn TwoLevelModel>,
}

pub fn load_model(path: &Path) -> Result<LoadedModel, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let config = ModelConfig::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let model = config
        .build()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(LoadedModel { config, model })
}

fn describe_model(meta: &mut Metadata, loaded: &LoadedModel) {
    let dom = loaded.model.domain();
    meta.model = Some(serde_json::to_value(&loaded.config).expect("config serializes"));
    meta.model_domain = Some([number(dom.lo), number(dom.hi)]);
    meta.delta_convention = loaded.config.delta_convention().map_or("n/a", |c| c.as_str());
}

fn grid(lo: f64, hi: f64, steps: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(CliError::Config(format!("steps must be >= 2, got {steps}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Config(format!("range {lo}:{hi} must be finite and nonempty")));
    }
    if log && lo <= 0.0 {
        return Err(CliError::Config("logarithmic spacing needs a positive range".into()));
    }
    let n = (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            let s = k as f64 / n;
            if log {
                (lo.ln() + (hi.ln() - lo.ln()) * s).exp()
            } else if k == steps - 1 {
                hi
            } else {
                lo + (hi - lo) * s
            }
        })
        .collect())
}

fn pick_format(f: Option<Format>, default: Format) -> Format {
    f.unwrap_or(default)
}

fn flag_of(e: &Error) -> &'static str {
    match e {
        Error::DegenerateBundle => "degenerate",
        Error::DeterministicOutcome { .. } => "deterministic-outcome",
        Error::DomainExceeded { .. } => "oracle-stencil-outside-domain",
        Error::ZeroDerivative => "zero-derivative",
        _ => "error",
    }
}

fn join_flags(flags: &[&str]) -> Cell {
    Cell::Text(flags.join(";"))
}

/// The formula printed alongside the pipeline value, where one exists.
fn printed_qfi(spec: &ModelSpec, lambda: f64) -> Option<f64> {
    match spec {
        ModelSpec::Perturbation(p) => Some(perturbation_qfi_printed(p, lambda)),
        ModelSpec::Rabi(p) => Some(rabi_qfi_printed(p.omega0, lambda)),
        _ => None,
    }
}

/// λ = 0 on resonance, where the Rabi coefficients are defined by their limit.
fn resonance_limit(spec: &ModelSpec, lambda: f64) -> bool {
    match spec {
        ModelSpec::Rabi(p) => lambda == 0.0 && p.omega == p.omega0,
        ModelSpec::ThreeLevel(t) => resonance_limit(&t.base.spec, lambda),
        _ => false,
    }
}

const LAMBDA_COLUMNS: [&str; 11] = [
    "lambda",
    "omega0",
    "delta",
    "gamma",
    "h_minus",
    "h_plus",
    "gap",
    "x",
    "H_qfi",
    "H_fidelity_oracle",
    "H_paper_printed",
];

fn lambda_row(
    model: &dyn TwoLevelModel,
    spec: &ModelSpec,
    lambda: f64,
    direction: Option<&MeasurementDirection>,
) -> Vec<Cell> {
    let c = model.coefficients(lambda);
    let s = eigenvalues(&c);
    let mut flags = Vec::new();
    if resonance_limit(spec, lambda) {
        flags.push("resonance-limit");
    }
    let mut row: Vec<Cell> = vec![
        lambda.into(),
        c.omega0.into(),
        c.delta.into(),
        c.gamma.into(),
        s.h_minus.into(),
        s.h_plus.into(),
        s.gap.into(),
        s.x.into(),
    ];
    let derivs = model.derivatives(lambda);
    let h = derivs.as_ref().map_err(Clone::clone).and_then(|d| qfi_ground(&c, d));
    match &h {
        Ok(v) => row.push((*v).into()),
        Err(e) => {
            flags.push(flag_of(e));
            row.push(Cell::Missing)
        }
    }
    if h.is_ok() {
        match qfi_fidelity_oracle_default(model, lambda) {
            Ok(v) => row.push(v.into()),
            Err(e) => {
                flags.push(flag_of(&e));
                row.push(Cell::Missing)
            }
        }
    } else {
        row.push(Cell::Missing);
    }
    row.push(printed_qfi(spec, lambda).into());
    if let Some(r) = direction {
        match derivs.and_then(|d| fisher_projective(&c, &d, r)) {
            Ok(f) => {
                row.push(f.value().into());
                let hv = *h.as_ref().unwrap();
                row.push(if hv > 0.0 { (f.value() / hv).into() } else { Cell::Missing });
            }
            Err(e) => {
                if !flags.contains(&flag_of(&e)) {
                    flags.push(flag_of(&e));
                }
                row.push(Cell::Missing);
                row.push(Cell::Missing);
            }
        }
    }
    row.push(join_flags(&flags));
    row
}

fn with_phi(config: &ModelConfig, phi: f64) -> Result<ModelConfig, CliError> {
    let mut out = config.clone();
    match &mut out.spec {
        ModelSpec::Perturbation(p) => p.phi = phi,
        ModelSpec::ThreeLevel(t) => *t.base = with_phi(&t.base, phi)?,
        _ => return Err(CliError::Config("phi scans need a perturbation model".into())),
    }
    Ok(out)
}

pub fn qfi_scan(args: &QfiScanArgs) -> Result<(), CliError> {
    let loaded = load_model(&args.model)?;
    let model = loaded.model.as_ref();
    let dom = model.domain();
    let mut meta = Metadata::new(
        "qfi-scan",
        args.output.seed,
        json!({
            "var": format!("{:?}", args.var).to_lowercase(),
            "range": args.range.map(|(a, b)| [number(a), number(b)]),
            "steps": args.steps,
            "lambda": args.lambda,
            "direction": args.direction.map(|r| r.components()),
        }),
    );
    describe_model(&mut meta, &loaded);
    let need_lambda = || {
        args.lambda
            .ok_or_else(|| CliError::Config("--lambda is required for phi and theta scans".into()))
    };
    let mut extra: Vec<&'static str> = Vec::new();
    if args.direction.is_some() {
        extra.extend(["F_projective", "g"]);
    }
    let table = match args.var {
        ScanVar::Lambda => {
            let (lo, hi) = args.range.unwrap_or((dom.lo, dom.hi));
            if !(dom.contains(lo) && dom.contains(hi)) {
                return Err(CliError::Config(format!(
                    "range {lo}:{hi} leaves the model domain [{}, {}]",
                    dom.lo, dom.hi
                )));
            }
            let points = grid(lo, hi, args.steps, false)?;
            let rows = points
                .par_iter()
                .map(|&l| lambda_row(model, &loaded.config.spec, l, args.direction.as_ref()))
                .collect();
            let mut columns = LAMBDA_COLUMNS.to_vec();
            columns.extend(&extra);
            columns.push("flag");
            Table { columns, rows }
        }
        ScanVar::Phi => {
            let lambda = need_lambda()?;
            let (lo, hi) = args
                .range
                .ok_or_else(|| CliError::Config("--range is required for phi scans".into()))?;
            let points = grid(lo, hi, args.steps, false)?;
            let rows = points
                .par_iter()
                .map(|&phi| {
                    let cfg = with_phi(&loaded.config, phi)?;
                    let m = cfg.build().map_err(|e| CliError::Config(e.to_string()))?;
                    if !m.domain().contains(lambda) {
                        return Err(CliError::Config(format!("lambda = {lambda} outside the model domain")));
                    }
                    let mut row = vec![Cell::Num(phi)];
                    row.extend(lambda_row(m.as_ref(), &cfg.spec, lambda, args.direction.as_ref()));
                    Ok(row)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut columns = vec!["phi"];
            columns.extend(LAMBDA_COLUMNS);
            columns.extend(&extra);
            columns.push("flag");
            Table { columns, rows }
        }
        ScanVar::Theta => {
            let lambda = need_lambda()?;
            if !dom.contains(lambda) {
                return Err(CliError::Config(format!("lambda = {lambda} outside the model domain")));
            }
            let (lo, hi) = args.range.unwrap_or((0.0, TAU));
            let c = model.coefficients(lambda);
            let d = model.derivatives(lambda)?;
            let h = qfi_ground(&c, &d)?;
            let rows = grid(lo, hi, args.steps, false)?
                .par_iter()
                .map(|&theta| {
                    let r = MeasurementDirection::in_xz_plane(theta);
                    let mut row = vec![Cell::Num(theta), Cell::Num(r.r1()), Cell::Num(r.r3())];
                    match fisher_projective(&c, &d, &r) {
                        Ok(f) => {
                            row.push(f.value().into());
                            row.push(if h > 0.0 { (f.value() / h).into() } else { Cell::Missing });
                            row.extend([h.into(), Cell::Text(String::new())]);
                        }
                        Err(e) => row.extend([Cell::Missing, Cell::Missing, h.into(), Cell::Text(flag_of(&e).into())]),
                    }
                    row
                })
                .collect();
            Table {
                columns: vec!["theta", "r1", "r3", "F_projective", "g", "H_qfi", "flag"],
                rows,
            }
        }
    };
    let bytes = table.render(&meta, pick_format(args.output.format, Format::Csv))?;
    emit(args.output.out.as_deref(), &bytes)
}

pub fn g_surface(args: &GSurfaceArgs) -> Result<(), CliError> {
    if args.grid < 16 {
        return Err(CliError::Config(format!("grid must be >= 16, got {}", args.grid)));
    }
    if let Some(x) = args.x.iter().find(|x| !x.is_finite()) {
        return Err(CliError::Config(format!("x must be finite, got {x}")));
    }
    let meta = Metadata::new("g-surface", args.output.seed, json!({ "x": args.x, "grid": args.grid }));
    let axis = grid(-1.0, 1.0, args.grid, false)?;
    let mut rows = Vec::new();
    for &x in &args.x {
        let block: Vec<Vec<Cell>> = axis
            .par_iter()
            .flat_map_iter(|&r1| {
                axis.iter().filter_map(move |&r3| {
                    let rest = 1.0 - r1 * r1 - r3 * r3;
                    if rest < -1e-12 {
                        return None;
                    }
                    let r2 = rest.max(0.0).sqrt();
                    let r = MeasurementDirection::new(r1, r2, r3).ok()?;
                    let (g, flag) = match g_function(x, &r) {
                        Ok(g) => (Cell::Num(g), String::new()),
                        Err(e) => (Cell::Missing, flag_of(&e).to_string()),
                    };
                    Some(vec![x.into(), r1.into(), r2.into(), r3.into(), g, Cell::Text(flag)])
                })
            })
            .collect();
        rows.extend(block);
    }
    let table = Table {
        columns: vec!["x", "r1", "r2", "r3", "g", "flag"],
        rows,
    };
    let bytes = table.render(&meta, pick_format(args.output.format, Format::Csv))?;
    emit(args.output.out.as_deref(), &bytes)
}

/// Least-squares fit of `y/β² = a + b·β²`, returning `a`.
fn small_beta_fit(points: &[(f64, f64)]) -> Option<f64> {
    let data: Vec<(f64, f64)> = points.iter().map(|&(b, y)| (b * b, y / (b * b))).collect();
    match data.len() {
        0 => None,
        1 => Some(data[0].1),
        n => {
            let n = n as f64;
            let (sx, sy) = data.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
            let (mx, my) = (sx / n, sy / n);
            let sxx: f64 = data.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
            let sxy: f64 = data.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
            let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
            Some(my - slope * mx)
        }
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

pub fn thermal_scan(args: &ThermalScanArgs) -> Result<(), CliError> {
    let loaded = load_model(&args.model)?;
    let model = loaded.model.as_ref();
    if !model.domain().contains(args.lambda) {
        return Err(CliError::Config(format!("lambda = {} outside the model domain", args.lambda)));
    }
    let (lo, hi) = args.range;
    if lo < 0.0 {
        return Err(CliError::Config("beta must be >= 0".into()));
    }
    let betas = grid(lo, hi, args.steps, args.log)?;
    let c = model.coefficients(args.lambda);
    let d = model.derivatives(args.lambda)?;
    let h0 = qfi_ground(&c, &d)?;
    let r = args.direction;
    let mut meta = Metadata::new(
        "thermal-scan",
        args.output.seed,
        json!({
            "lambda": args.lambda,
            "range": [lo, hi],
            "steps": args.steps,
            "log": args.log,
            "direction": r.components(),
        }),
    );
    describe_model(&mut meta, &loaded);

    struct Point {
        beta: f64,
        h_total: f64,
        f_beta: Option<f64>,
    }
    let evaluated = betas
        .par_iter()
        .map(|&beta| -> Result<(Vec<Cell>, Point), CliError> {
            let b = thermal_qfi(&c, &d, beta)?;
            let mu = purity(&thermal_state(&c, beta)?);
            let mut flags = Vec::new();
            let f = match thermal_fisher(&c, &d, beta, &r) {
                Ok(f) => Some(f.value),
                Err(e) => {
                    flags.push(flag_of(&e));
                    None
                }
            };
            let g = match f {
                Some(f) if b.total > 0.0 => Cell::Num(f / b.total),
                _ => {
                    flags.push("no-information");
                    Cell::Missing
                }
            };
            let row = vec![
                beta.into(),
                b.classical.into(),
                b.quantum.into(),
                b.total.into(),
                b.k_c.into(),
                b.k_q.into(),
                mu.into(),
                f.into(),
                g,
                join_flags(&flags),
            ];
            Ok((row, Point { beta, h_total: b.total, f_beta: f }))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (rows, points): (Vec<_>, Vec<_>) = evaluated.into_iter().unzip();

    let half_gap = c.half_gap();
    let in_regime: Vec<&Point> = points.iter().filter(|p| p.beta > 0.0 && p.beta * half_gap <= 0.5).collect();
    let fit_h = small_beta_fit(&in_regime.iter().map(|p| (p.beta, p.h_total)).collect::<Vec<_>>());
    let fit_f = small_beta_fit(&in_regime.iter().filter_map(|p| p.f_beta.map(|f| (p.beta, f))).collect::<Vec<_>>());
    let expected_h = d.d_gamma * d.d_gamma + d.d_delta * d.d_delta;
    let expected_f = thermal_fisher(&c, &d, 1.0, &r).map(|t| t.small_beta_coefficient).ok();
    let last = points.last().expect("steps >= 2");
    let top_ratio = if h0 > 0.0 { Some(last.h_total / h0) } else { None };
    let low_t_applies = last.beta * half_gap >= 10.0;
    let summary = json!({
        "metadata": meta,
        "coefficients": bundle_json(&c),
        "derivatives": derivative_json(&d),
        "H0": h0,
        "small_beta": {
            "points": in_regime.len(),
            "H_total_over_beta2": fit_h,
            "F_beta_over_beta2": fit_f,
            "expected_H_total_over_beta2": expected_h,
            "expected_F_beta_over_beta2": expected_f,
            "relative_error_H": fit_h.map(|a| rel_err(a, expected_h)),
            "relative_error_F": fit_f.zip(expected_f).map(|(a, b)| rel_err(a, b)),
            "F_over_H": fit_h.zip(fit_f).map(|(h, f)| f / h),
        },
        "low_temperature": {
            "beta": last.beta,
            "beta_times_half_gap": last.beta * half_gap,
            "H_total_over_H0": top_ratio,
            "applies": low_t_applies,
            "within_1e-6": if low_t_applies { top_ratio.map(|x| x >= 1.0 - 1e-6) } else { None },
        },
        "high_temperature_optimal_direction": optimal_direction_high_t(&d).ok().map(|r| r.components()),
        "ratio_directions": ratio_directions(&c).ok().map(|v| v.map(|r| r.components())),
    });

    let table = Table {
        columns: vec![
            "beta",
            "H_classical",
            "H_quantum",
            "H_total",
            "k_C",
            "k_Q",
            "purity",
            "F_beta",
            "g_effective",
            "flag",
        ],
        rows,
    };
    let bytes = table.render(&meta, pick_format(args.output.format, Format::Csv))?;
    emit(args.output.out.as_deref(), &bytes)?;
    let summary_path: Option<PathBuf> = args.summary.clone().or_else(|| {
        args.output.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".summary.json");
            PathBuf::from(s)
        })
    });
    if let Some(p) = summary_path {
        emit(Some(&p), &pretty(&summary))?;
    }
    Ok(())
}

fn bundle_json(c: &CoefficientBundle) -> Value {
    json!({ "omega0": c.omega0, "delta": c.delta, "gamma": c.gamma })
}

fn derivative_json(d: &DerivativeBundle) -> Value {
    json!({ "d_omega0": d.d_omega0, "d_delta": d.d_delta, "d_gamma": d.d_gamma })
}

pub fn estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let loaded = load_model(&args.model)?;
    let model = loaded.model.as_ref();
    let dom = model.domain();
    let (lo, hi) = args.range.unwrap_or((dom.lo, dom.hi));
    let search = Domain::new(lo, hi)?;
    if !search.is_finite() {
        return Err(CliError::Config(
            "the model domain is unbounded; pass a finite --range search interval".into(),
        ));
    }
    if !dom.contains(args.lambda_true) {
        return Err(CliError::Config(format!("lambda_true = {} outside the model domain", args.lambda_true)));
    }
    let config = EstimatorConfig {
        method: args.method.into(),
        search_interval: search,
        grid_points: args.grid_points,
        tolerance: args.tolerance,
    };
    let mut meta = Metadata::new(
        "estimate",
        args.output.seed,
        json!({
            "lambda_true": args.lambda_true,
            "direction": args.direction.components(),
            "beta": number(args.beta),
            "shots": args.shots,
            "batches": args.batches,
            "estimator": config,
        }),
    );
    describe_model(&mut meta, &loaded);
    let report = run_experiment(
        model,
        args.lambda_true,
        &args.direction,
        args.beta,
        args.shots,
        args.batches,
        args.output.seed,
        &config,
    )?;
    let bytes = match pick_format(args.output.format, Format::Json) {
        Format::Json => pretty(&json!({
            "metadata": meta,
            "report": report,
            "variance_to_quantum_crb": report.variance_to_quantum_crb(),
            "variance_to_classical_crb": report.variance_to_classical_crb(),
        })),
        Format::Csv => {
            let rows = report
                .estimates
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let flag = if report.flagged_batches.contains(&k) { "flagged" } else { "" };
                    vec![Cell::Num(k as f64), Cell::Num(v), Cell::Text(flag.into())]
                })
                .collect();
            Table {
                columns: vec!["batch", "estimate", "flag"],
                rows,
            }
            .render(&meta, Format::Csv)?
        }
    };
    emit(args.output.out.as_deref(), &bytes)
}

pub fn model_validate(args: &ModelValidateArgs) -> Result<(), CliError> {
    let loaded = load_model(&args.model)?;
    let warnings = validate_model(loaded.model.as_ref(), args.steps);
    let mut meta = Metadata::new("model-validate", args.output.seed, json!({ "samples": args.steps }));
    describe_model(&mut meta, &loaded);
    let bytes = match pick_format(args.output.format, Format::Json) {
        Format::Json => pretty(&json!({
            "metadata": meta,
            "name": loaded.model.name(),
            "ok": warnings.is_empty(),
            "warnings": warnings,
        })),
        Format::Csv => {
            let rows = warnings
                .iter()
                .map(|w| match w {
                    ModelWarning::NonPositiveDelta { lambda, delta } => {
                        vec![Cell::Text("non-positive-delta".into()), Cell::Num(*lambda), Cell::Num(*delta), Cell::Missing]
                    }
                    ModelWarning::Crossing { lambda } => {
                        vec![Cell::Text("crossing".into()), Cell::Num(*lambda), Cell::Missing, Cell::Missing]
                    }
                    ModelWarning::Regime { message } => {
                        vec![Cell::Text("regime".into()), Cell::Missing, Cell::Missing, Cell::Text(message.clone())]
                    }
                })
                .collect();
            Table {
                columns: vec!["kind", "lambda", "delta", "message"],
                rows,
            }
            .render(&meta, Format::Csv)?
        }
    };
    emit(args.output.out.as_deref(), &bytes)
}
