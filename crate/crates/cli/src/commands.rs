//! One function per subcommand; each renders its report as a string.

use qkorobov_core::analysis::{
    coefficient_bound_audit, convergence_study, corpus, integral_coefficient, resource_estimate, KorobovTestFunction,
    Norm,
};
use qkorobov_core::lcu::{
    ancilla_count, assemble_lcu, circuit_for_point, evaluate_via_circuit_with, hadamard_test_circuit, EvalOptions,
    LcuPlan,
};
use qkorobov_core::simulator::trace;
use qkorobov_core::simulator::{resource_report, Circuit, ResourceReport};
use qkorobov_core::sparsegrid::{chebyshev_expansion, evaluate_interpolant, surplus_coefficients, SurplusMap};
use serde::Serialize;

use crate::config::{Command, ConfigError, Format, RunConfig};
use crate::output::{json, num, opt_num, LogLogPlot, Table};

/// Widest circuit the `resources` command will build.
const MAX_MEASURED_WIDTH: usize = 22;
/// Largest selector register for which the dense preparation unitary is built.
const MAX_MEASURED_ANCILLAS: usize = 12;
/// Allowed stencil-vs-integral difference in `audit`.
const DUAL_ORACLE_TOL: f64 = 1e-6;
/// Coordinates used for "generic" evaluation points, cycled over dimensions.
const GENERIC_POINT: [f64; 4] = [0.3141, 0.7183, 0.5772, 0.4142];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] qkorobov_core::Error),
}

/// Rendered output plus any invariant violations found while producing it.
pub struct Report {
    pub body: String,
    pub violations: Vec<String>,
}

impl From<String> for Report {
    fn from(body: String) -> Self {
        Self {
            body,
            violations: Vec::new(),
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.command {
        Command::Eval => eval(cfg).map(Report::from),
        Command::Coeffs => coeffs(cfg).map(Report::from),
        Command::Convergence => convergence(cfg).map(Report::from),
        Command::Resources => resources(cfg).map(Report::from),
        Command::Audit => audit(cfg),
        Command::Circuit => circuit(cfg).map(Report::from),
    }
}

fn interpolate(f: &KorobovTestFunction, n: u32) -> Result<SurplusMap, CliError> {
    Ok(surplus_coefficients(|x| f.eval(x), n, f.dim())?)
}

fn eval_options(cfg: &RunConfig) -> EvalOptions {
    EvalOptions {
        drop_identity_phases: !cfg.include_identity_gates,
    }
}

#[derive(Serialize)]
struct EvalRow {
    x: Vec<f64>,
    exact: f64,
    classical: f64,
    circuit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalized: Option<f64>,
    abs_diff: f64,
    one_norm: f64,
    terms: usize,
    ancillas: usize,
    resources: ResourceReport,
}

fn eval(cfg: &RunConfig) -> Result<String, CliError> {
    let f = cfg.require_function()?;
    let n = cfg.single_level(3)?;
    if cfg.points.is_empty() {
        return Err(ConfigError("eval needs at least one point (--x)".into()).into());
    }
    let s = interpolate(f, n)?;
    let mut rows = Vec::with_capacity(cfg.points.len());
    for x in &cfg.points {
        let classical = evaluate_interpolant(&s, x)?;
        let e = evaluate_via_circuit_with(&s, x, eval_options(cfg))?;
        rows.push(EvalRow {
            x: x.clone(),
            exact: f.eval(x),
            classical,
            circuit: e.value,
            normalized: cfg.normalized.then_some(e.raw),
            abs_diff: (e.value - classical).abs(),
            one_norm: e.one_norm,
            terms: e.term_count,
            ancillas: e.ancilla_count,
            resources: e.report,
        });
    }
    if cfg.format == Format::Json {
        return Ok(json(&rows));
    }
    let d = f.dim();
    let mut header: Vec<String> = (1..=d).map(|j| format!("x{j}")).collect();
    header.extend(["exact", "classical", "circuit"].map(String::from));
    if cfg.normalized {
        header.push("normalized".into());
    }
    header.extend(
        [
            "abs_diff",
            "one_norm",
            "terms",
            "ancillas",
            "width",
            "gate_count",
            "paper_depth",
            "layered_depth",
            "touch_depth",
        ]
        .map(String::from),
    );
    let mut table = Table::new(&header);
    for r in rows {
        let mut cells: Vec<String> = r.x.iter().map(|&t| num(t)).collect();
        cells.extend([num(r.exact), num(r.classical), num(r.circuit)]);
        if let Some(v) = r.normalized {
            cells.push(num(v));
        }
        let rep = r.resources;
        cells.extend([num(r.abs_diff), num(r.one_norm)]);
        cells.extend(
            [
                r.terms,
                r.ancillas,
                rep.width,
                rep.gate_count,
                rep.paper_depth,
                rep.layered_depth,
                rep.touch_depth,
            ]
            .map(|v| v.to_string()),
        );
        table.push(cells);
    }
    Ok(table.finish())
}

fn coeffs(cfg: &RunConfig) -> Result<String, CliError> {
    let f = cfg.require_function()?;
    let n = cfg.single_level(2)?;
    let s = interpolate(f, n)?;
    let mut doc = s.to_document();
    if cfg.with_quadrature {
        for (entry, (g, _)) in doc.entries.iter_mut().zip(s.entries()) {
            entry.quadrature = Some(integral_coefficient(f, &g));
        }
    }
    if cfg.format == Format::Json {
        return Ok(json(&doc));
    }
    let join = |v: &[u64]| v.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ");
    let mut header = vec!["level", "index", "value"];
    if cfg.with_quadrature {
        header.push("quadrature");
    }
    let mut table = Table::new(&header);
    for e in doc.entries {
        let level: Vec<u64> = e.level.iter().map(|&l| l as u64).collect();
        let mut cells = vec![join(&level), join(&e.index), num(e.value)];
        if cfg.with_quadrature {
            cells.push(opt_num(e.quadrature));
        }
        table.push(cells);
    }
    Ok(table.finish())
}

#[derive(Serialize)]
struct ConvergenceSummary<'a> {
    function: &'a str,
    d: usize,
    p: &'a str,
    rows: &'a [qkorobov_core::analysis::ConvergenceRow],
    slope: Option<f64>,
    slope_ci: Option<(f64, f64)>,
    log_exponent: u32,
    corrected_slope: Option<f64>,
    shape_constant: Option<f64>,
}

fn convergence(cfg: &RunConfig) -> Result<String, CliError> {
    let f = cfg.require_function()?;
    let norm = cfg.norm.unwrap_or(Norm::Inf);
    let study = convergence_study(f, norm, cfg.levels_or(1..=8), cfg.seed)?;
    match cfg.format {
        Format::Json => Ok(json(&ConvergenceSummary {
            function: &study.function,
            d: study.d,
            p: &study.p,
            rows: &study.rows,
            slope: study.slope,
            slope_ci: study.slope_ci,
            log_exponent: study.log_exponent,
            corrected_slope: study.corrected_slope,
            shape_constant: study.shape_constant,
        })),
        Format::Svg => {
            let points: Vec<(f64, f64)> = study
                .rows
                .iter()
                .map(|r| (r.grid_points as f64, r.error(norm)))
                .collect();
            let title = format!("{} (d = {}), L^{} error vs N", study.function, study.d, study.p);
            Ok(LogLogPlot {
                title: &title,
                points: &points,
                slope: study.slope,
                log_exponent: study.log_exponent,
            }
            .render())
        }
        Format::Csv => {
            let with_p = study.rows.iter().any(|r| r.error_p.is_some());
            let mut header = vec!["n", "N", "error_inf", "error_2", "slope_running"];
            if with_p {
                header.push("error_p");
            }
            let mut table = Table::new(&header);
            for r in &study.rows {
                let mut cells = vec![
                    r.n.to_string(),
                    r.grid_points.to_string(),
                    num(r.error_inf),
                    num(r.error_2),
                    opt_num(r.slope_running),
                ];
                if with_p {
                    cells.push(opt_num(r.error_p));
                }
                table.push(cells);
            }
            Ok(table.finish())
        }
    }
}

#[derive(Serialize)]
struct Measurement {
    function: String,
    d: usize,
    n: u32,
    x: Vec<f64>,
    terms: usize,
    ancillas: usize,
    degree_sum: Option<usize>,
    width: usize,
    touch_depth: Option<usize>,
    paper_depth: Option<usize>,
    /// `(2‖n‖₁ + dM) log₂ max(M, 2)`.
    envelope: Option<f64>,
    depth_ratio: Option<f64>,
    estimate_only: bool,
}

#[derive(Serialize)]
struct ResourcesReport {
    units: &'static str,
    estimates: Vec<qkorobov_core::analysis::ResourceEstimate>,
    measurements: Vec<Measurement>,
}

fn measure(f: &KorobovTestFunction, n: u32, cfg: &RunConfig) -> Result<Measurement, CliError> {
    let d = f.dim();
    let x: Vec<f64> = (0..d).map(|j| GENERIC_POINT[j % GENERIC_POINT.len()]).collect();
    let s = interpolate(f, n)?;
    let terms = chebyshev_expansion(&s, &x)?;
    let m = terms.iter().filter(|t| t.weight != 0.0).count();
    let ancillas = ancilla_count(m.max(1));
    let width = d + ancillas + 1;
    let mut row = Measurement {
        function: f.name().to_string(),
        d,
        n,
        x,
        terms: m,
        ancillas,
        degree_sum: None,
        width,
        touch_depth: None,
        paper_depth: None,
        envelope: None,
        depth_ratio: None,
        estimate_only: true,
    };
    if width > MAX_MEASURED_WIDTH || ancillas > MAX_MEASURED_ANCILLAS {
        return Ok(row);
    }
    let Some(plan) = LcuPlan::from_terms(&terms, cfg.include_identity_gates)? else {
        row.estimate_only = false;
        return Ok(row);
    };
    let lcu = assemble_lcu(&plan)?;
    let lcu_rep = resource_report(&lcu);
    let envelope = (2 * plan.degree_sum() + d * m) as f64 * (m.max(2) as f64).log2();
    row.width = resource_report(&hadamard_test_circuit(&lcu)?).width;
    row.degree_sum = Some(plan.degree_sum());
    row.touch_depth = Some(lcu_rep.touch_depth);
    row.paper_depth = Some(lcu_rep.paper_depth);
    row.envelope = Some(envelope);
    row.depth_ratio = Some(lcu_rep.touch_depth as f64 / envelope);
    row.estimate_only = false;
    Ok(row)
}

fn resources(cfg: &RunConfig) -> Result<String, CliError> {
    let dims: Vec<usize> = match cfg.d {
        Some(d) => vec![d],
        None => (1..=3).collect(),
    };
    let norms = match cfg.norm {
        Some(norm) => vec![norm],
        None => vec![Norm::P(2.0), Norm::Inf],
    };
    let mut estimates = Vec::new();
    for &norm in &norms {
        for &d in &dims {
            for &e in &cfg.eps {
                estimates.push(resource_estimate(e, d, norm)?);
            }
        }
    }
    let mut measurements = Vec::new();
    for &d in &dims {
        let f = match &cfg.function {
            Some(f) => f.clone(),
            None => KorobovTestFunction::by_name("prod-sin", d)?,
        };
        for n in cfg.levels_or(1..=4) {
            measurements.push(measure(&f, n, cfg)?);
        }
    }
    if cfg.format == Format::Json {
        return Ok(json(&ResourcesReport {
            units: "relative",
            estimates,
            measurements,
        }));
    }
    let mut table = Table::new(&[
        "epsilon",
        "d",
        "p",
        "formula",
        "alpha",
        "beta",
        "lambert_w",
        "depth",
        "width",
        "simplified_depth",
        "simplified_width",
    ]);
    for e in estimates {
        table.push(vec![
            num(e.epsilon),
            e.d.to_string(),
            e.p.map(num).unwrap_or_else(|| "inf".into()),
            format!("{:?}", e.formula).to_lowercase(),
            num(e.alpha),
            num(e.beta),
            num(e.lambert_w_value),
            num(e.predicted_depth_bound),
            num(e.predicted_width_bound),
            num(e.simplified_depth_bound),
            num(e.simplified_width_bound),
        ]);
    }
    Ok(table.finish())
}

#[derive(Serialize)]
struct AuditRow {
    function: String,
    d: usize,
    n: u32,
    checked: usize,
    max_ratio_sup: f64,
    max_ratio_l2: f64,
    violations: usize,
    dual_max_abs_diff: f64,
    pass: bool,
}

fn audit(cfg: &RunConfig) -> Result<Report, CliError> {
    let functions: Vec<KorobovTestFunction> = match (&cfg.function, cfg.d) {
        (Some(f), _) => vec![f.clone()],
        (None, Some(d)) => corpus().into_iter().filter(|f| f.dim() == d).collect(),
        (None, None) => corpus().into_iter().filter(|f| f.dim() <= 2).collect(),
    };
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for f in &functions {
        for n in cfg.levels_or(1..=4) {
            let mut s = interpolate(f, n)?;
            if let Some(factor) = cfg.scale_coefficients {
                s = s.scaled(factor);
            }
            let rep = coefficient_bound_audit(f, &s);
            let dual = qkorobov_core::analysis::dual_oracle_comparison(f, &s);
            for v in &rep.violations {
                violations.push(format!(
                    "{} n={n}: level {:?} index {:?} violates the {:?} bound: |v| = {} > {} (ratio {})",
                    f.name(),
                    v.level,
                    v.index,
                    v.bound,
                    num(v.value.abs()),
                    num(v.limit),
                    num(v.ratio)
                ));
            }
            if dual.max_abs_diff > DUAL_ORACLE_TOL {
                violations.push(format!(
                    "{} n={n}: stencil and integral coefficients differ by {} at level {:?} index {:?}",
                    f.name(),
                    num(dual.max_abs_diff),
                    dual.worst_level,
                    dual.worst_index
                ));
            }
            rows.push(AuditRow {
                function: f.name().to_string(),
                d: f.dim(),
                n,
                checked: rep.checked,
                max_ratio_sup: rep.max_ratio_sup,
                max_ratio_l2: rep.max_ratio_l2,
                violations: rep.violations.len(),
                dual_max_abs_diff: dual.max_abs_diff,
                pass: rep.passed() && dual.max_abs_diff <= DUAL_ORACLE_TOL,
            });
        }
    }
    let body = if cfg.format == Format::Json {
        json(&rows)
    } else {
        let mut table = Table::new(&[
            "function",
            "d",
            "n",
            "checked",
            "max_ratio_sup",
            "max_ratio_l2",
            "violations",
            "dual_max_abs_diff",
            "pass",
        ]);
        for r in rows {
            table.push(vec![
                r.function,
                r.d.to_string(),
                r.n.to_string(),
                r.checked.to_string(),
                num(r.max_ratio_sup),
                num(r.max_ratio_l2),
                r.violations.to_string(),
                num(r.dual_max_abs_diff),
                r.pass.to_string(),
            ]);
        }
        table.finish()
    };
    Ok(Report { body, violations })
}

fn circuit(cfg: &RunConfig) -> Result<String, CliError> {
    let f = cfg.require_function()?;
    let n = cfg.single_level(2)?;
    let [x] = cfg.points.as_slice() else {
        return Err(ConfigError("circuit needs exactly one point (--x)".into()).into());
    };
    let s = interpolate(f, n)?;
    let circuit = circuit_for_point(&s, x, eval_options(cfg))?.unwrap_or_else(|| Circuit::new(f.dim()));
    let mut text = trace::to_json(&circuit);
    text.push('\n');
    Ok(text)
}
