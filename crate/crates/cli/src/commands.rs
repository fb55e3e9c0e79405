use std::path::Path;

use rotlab_core::integrability::{classify_grid, GridRow};
use rotlab_core::maps::MapSpec;
use rotlab_core::modulus::{estimate_moduli, lemma_min_closed, lemma_min_oracle, CurveLabel};
use rotlab_core::plane::Complex;
use rotlab_core::rotation::{empirical_theorem1_constant, measure, RotationConfig};
use serde::Serialize;

use crate::acceptance::{self, Context, CriterionReport};
use crate::error::{CliError, CliResult};
use crate::output::{svg_plot, write_atomic, write_csv, write_json, Mark, Series};

/// Parses `0.2`, `-1e-3`, `1+1i`, `0.5-2i`, `3i`, `-i`.
pub fn parse_complex(text: &str) -> CliResult<Complex> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Config(format!("cannot parse complex number {text:?}"));
    let num = |t: &str| -> CliResult<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    let z = match s.strip_suffix('i').or_else(|| s.strip_suffix('j')) {
        None => Complex::new(s.parse::<f64>().map_err(|_| bad())?, 0.0),
        Some(body) => {
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
            match split {
                Some(k) => Complex::new(body[..k].parse::<f64>().map_err(|_| bad())?, num(&body[k..])?),
                None => Complex::new(0.0, num(body)?),
            }
        }
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(bad());
    }
    Ok(z)
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex> for ComplexJson {
    fn from(z: Complex) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EvalOutput {
    pub z: ComplexJson,
    pub value: ComplexJson,
    pub fz: Option<ComplexJson>,
    pub fzbar: Option<ComplexJson>,
    pub mu_abs: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
}

/// Value, derivatives, `|mu|` and `K` at one point. At the origin only the
/// value is defined.
pub fn cmd_eval(spec: &MapSpec, z: Complex) -> CliResult<EvalOutput> {
    let value = spec.evaluate(z).into();
    if z.norm() == 0.0 {
        return Ok(EvalOutput { z: z.into(), value, fz: None, fzbar: None, mu_abs: None, k: None });
    }
    let pair = spec.wirtinger(z)?;
    Ok(EvalOutput {
        z: z.into(),
        value,
        fz: Some(pair.fz.into()),
        fzbar: Some(pair.fzbar.into()),
        mu_abs: Some(spec.beltrami_modulus(z)?),
        k: Some(spec.distortion(z)?),
    })
}

#[derive(Debug, Clone, Serialize)]
struct RotationRow {
    r: f64,
    theta: f64,
    winding: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RotationSummary {
    pub family: &'static str,
    pub z0: ComplexJson,
    pub p: f64,
    pub gamma_estimate: f64,
    pub fitted_exponent: Option<f64>,
    /// Only defined about the origin, where the maps fix 0 and 1.
    pub c_emp: Option<f64>,
}

pub struct RotationArgs {
    pub z0: Complex,
    pub rmin: f64,
    pub decades: f64,
    pub n_theta: usize,
    pub per_decade: usize,
}

pub fn rotation_radii(rmin: f64, decades: f64, per_decade: usize) -> CliResult<Vec<f64>> {
    if !(rmin > 0.0) || !(decades > 0.0) || per_decade == 0 {
        return Err(CliError::Config("need rmin > 0, decades > 0".into()));
    }
    let rmax = rmin * 10f64.powf(decades);
    if !(rmax < 1.0) {
        return Err(CliError::Config("rmin * 10^decades must stay below 1".into()));
    }
    let n = (decades * per_decade as f64).ceil() as usize;
    Ok((0..=n).map(|k| rmax * 10f64.powf(-decades * k as f64 / n as f64)).collect())
}

pub fn cmd_rotation(spec: &MapSpec, args: &RotationArgs, out: &Path) -> CliResult<RotationSummary> {
    let radii = rotation_radii(args.rmin, args.decades, args.per_decade)?;
    let config = RotationConfig { n_theta: args.n_theta, ..RotationConfig::default() };
    let report = measure(spec, args.z0, &radii, &config)?;
    let mut rows = Vec::with_capacity(radii.len() * report.theta_samples.len());
    for (i, &r) in report.radii.iter().enumerate() {
        for (j, &theta) in report.theta_samples.iter().enumerate() {
            rows.push(RotationRow { r, theta, winding: report.winding[i][j] });
        }
    }
    write_csv(&out.join("rotation.csv"), &rows, &["r", "theta", "winding"])?;
    let c_emp = if args.z0.norm() == 0.0 { Some(empirical_theorem1_constant(spec, spec.p(), &radii)?) } else { None };
    let summary = RotationSummary {
        family: spec.family().name(),
        z0: args.z0.into(),
        p: spec.p(),
        gamma_estimate: report.gamma_estimate,
        fitted_exponent: report.fitted_exponent,
        c_emp,
    };
    write_json(&out.join("rotation.json"), &summary)?;
    let x = |r: f64| (-r.ln()).powi(2);
    let mut series = vec![Series {
        name: "sup winding".into(),
        color: "#1f77b4",
        mark: Mark::Dots,
        points: report.radii.iter().zip(&report.sup_winding).map(|(&r, &s)| (x(r), s)).collect(),
    }];
    if let Some(c) = c_emp {
        series.push(Series {
            name: format!("(c_emp/p) log^2(1/r), c_emp = {c:.4}"),
            color: "#d62728",
            mark: Mark::Line,
            points: report.radii.iter().map(|&r| (x(r), c / spec.p() * x(r))).collect(),
        });
    }
    let svg = svg_plot(&format!("winding of {}", spec.family().name()), "log^2(1/r)", "winding (rad)", &series);
    write_atomic(&out.join("rotation.svg"), svg.as_bytes())?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ModulusRow {
    pub z0: f64,
    pub upper: f64,
    pub lower: f64,
    pub n_z0: i64,
}

#[derive(Debug, Clone, Serialize)]
struct CrossingRow {
    theta: f64,
    x_i: f64,
    y_i: f64,
    label: &'static str,
}

/// Both moduli bounds across the `z0` sweep. Crossings are written for the
/// smallest `z0`.
pub fn cmd_modulus(spec: &MapSpec, p: f64, z0s: &[f64], n_theta: usize, out: &Path) -> CliResult<Vec<ModulusRow>> {
    if z0s.is_empty() {
        return Err(CliError::Config("empty z0 sweep".into()));
    }
    let mut rows = Vec::with_capacity(z0s.len());
    let mut deepest = None;
    for &z0 in z0s {
        let est = estimate_moduli(spec, z0, p, n_theta)?;
        rows.push(ModulusRow { z0, upper: est.upper.total(), lower: est.lower, n_z0: est.n_z0 });
        if deepest.as_ref().is_none_or(|d: &rotlab_core::modulus::ModulusEstimate| z0 < d.z0) {
            deepest = Some(est);
        }
    }
    write_csv(&out.join("modulus.csv"), &rows, &["z0", "upper", "lower", "n_z0"])?;
    let mut crossings = Vec::new();
    for rec in &deepest.expect("non-empty sweep").records {
        for pair in &rec.pairs {
            let label = match pair.inner {
                CurveLabel::E => "EF",
                CurveLabel::F => "FE",
            };
            crossings.push(CrossingRow { theta: rec.theta, x_i: pair.x, y_i: pair.y, label });
        }
    }
    write_csv(&out.join("crossings.csv"), &crossings, &["theta", "x_i", "y_i", "label"])?;
    let x = |z0: f64| (1.0 / z0).ln().powi(2);
    let svg = svg_plot(
        &format!("moduli bounds for {}", spec.family().name()),
        "log^2(1/z0)",
        "modulus",
        &[
            Series {
                name: "weighted upper bound".into(),
                color: "#d62728",
                mark: Mark::Line,
                points: rows.iter().map(|r| (x(r.z0), r.upper)).collect(),
            },
            Series {
                name: "crossing lower bound".into(),
                color: "#1f77b4",
                mark: Mark::Dots,
                points: rows.iter().map(|r| (x(r.z0), r.lower)).collect(),
            },
        ],
    );
    write_atomic(&out.join("modulus.svg"), svg.as_bytes())?;
    if let Some(bad) = rows.iter().find(|r| !(r.lower <= r.upper)) {
        return Err(CliError::Invariant(format!(
            "lower bound {} exceeds upper bound {} at z0 = {}",
            bad.lower, bad.upper, bad.z0
        )));
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LemmaRow {
    pub a: f64,
    pub n: usize,
    pub closed: f64,
    pub oracle: f64,
    pub max_abs_partition_error: f64,
}

pub fn cmd_lemma(a: f64, n: usize, out: &Path) -> CliResult<LemmaRow> {
    let closed = lemma_min_closed(a, n)?;
    let oracle = lemma_min_oracle(a, n)?;
    let err = oracle
        .partition
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - a.powf((n - i) as f64 / n as f64)).abs())
        .fold(0.0, f64::max);
    let row = LemmaRow { a, n, closed, oracle: oracle.value, max_abs_partition_error: err };
    write_csv(&out.join("lemma.csv"), std::slice::from_ref(&row), &["a", "n", "closed", "oracle", "max_abs_partition_error"])?;
    Ok(row)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerdictRow {
    pub family: &'static str,
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
    pub p: f64,
    pub analytic: bool,
    pub numeric: &'static str,
    pub fitted_exponent: Option<f64>,
}

fn verdict_row(row: &GridRow) -> VerdictRow {
    VerdictRow {
        family: row.spec.family().name(),
        c1: row.spec.c1(),
        c2: row.spec.c2(),
        alpha: row.spec.alpha(),
        p: row.verdict.p,
        analytic: row.verdict.analytic,
        numeric: row.verdict.numeric.name(),
        fitted_exponent: row.verdict.fitted_exponent,
    }
}

/// Classifies the given map, or the default straddling grids when `spec` is
/// `None`. Fails with an invariant error on any disagreement.
pub fn cmd_integrability(spec: Option<&MapSpec>, p: f64, out: &Path) -> CliResult<Vec<VerdictRow>> {
    let grids = match spec {
        Some(s) => vec![("map", vec![*s])],
        None => acceptance::integrability_grids(p)?,
    };
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for (_, specs) in &grids {
        let report = classify_grid(specs, p)?;
        for r in report.disagreements() {
            bad.push(format!("{:?}", r.spec));
        }
        rows.extend(report.rows.iter().map(verdict_row));
    }
    write_csv(
        &out.join("verdicts.csv"),
        &rows,
        &["family", "c1", "c2", "alpha", "p", "analytic", "numeric", "fitted_exponent"],
    )?;
    if !bad.is_empty() && spec.is_none() {
        return Err(CliError::Invariant(format!("numeric verdict disagrees with the predicate for {}", bad.join(", "))));
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub seed: u64,
    pub all_passed: bool,
    pub criteria: Vec<CriterionReport>,
}

pub fn cmd_report(ctx: &Context, out: &Path) -> CliResult<Report> {
    let criteria = acceptance::run_all(ctx);
    let report = Report { seed: ctx.seed, all_passed: criteria.iter().all(|c| c.passed), criteria };
    write_json(&out.join("report.json"), &report)?;
    Ok(report)
}
