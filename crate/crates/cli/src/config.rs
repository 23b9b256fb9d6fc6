//! Run configuration: command-line flags merged over an optional JSON file.

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use qkorobov_core::analysis::{parse_expr, KorobovTestFunction, Norm};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Eval,
    Coeffs,
    Convergence,
    Resources,
    Audit,
    Circuit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Parser)]
#[command(
    name = "qkorobov",
    version,
    about = "Sparse-grid interpolation of Korobov functions and its QSP/LCU circuits"
)]
pub struct Cli {
    pub command: Option<Command>,
    /// Corpus function: prod-quad, prod-sin, prod-cubic, asym, mixed, zero.
    #[arg(long = "fn", value_name = "NAME")]
    pub function: Option<String>,
    /// Inline product, e.g. "x(1-x)*sin(pi x)"; one factor per dimension.
    #[arg(long, value_name = "SPEC")]
    pub expr: Option<String>,
    /// Dimension (default 1; implied by --expr).
    #[arg(long)]
    pub d: Option<usize>,
    /// Sparse-grid level.
    #[arg(long)]
    pub n: Option<u32>,
    /// Inclusive level range for `convergence`.
    #[arg(long = "n-range", value_name = "A..B")]
    pub n_range: Option<String>,
    /// 2, inf, or any finite P ≥ 2.
    #[arg(long)]
    pub p: Option<String>,
    /// Points separated by ';', coordinates by ','.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Accuracy targets for `resources`, comma separated.
    #[arg(long, value_name = "LIST")]
    pub eps: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for Monte Carlo Lp error estimates.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also report the circuit output before the ‖w‖₁ rescaling.
    #[arg(long)]
    pub normalized: bool,
    /// Keep the zero-angle phase gates in QSP blocks.
    #[arg(long)]
    pub include_identity_gates: bool,
    /// Add integral-formula values to `coeffs` output.
    #[arg(long)]
    pub with_quadrature: bool,
    /// JSON file with the same keys as the flags; flags win.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Multiply every surplus before auditing (fault injection).
    #[arg(long, hide = true)]
    pub scale_coefficients: Option<f64>,
}

/// A number or a string such as `"inf"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    fn text(&self) -> String {
        match self {
            Scalar::Number(v) => v.to_string(),
            Scalar::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Points {
    Text(String),
    Flat(Vec<f64>),
    Nested(Vec<Vec<f64>>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
struct FileConfig {
    command: Option<Command>,
    #[serde(rename = "fn")]
    function: Option<String>,
    expr: Option<String>,
    d: Option<usize>,
    n: Option<u32>,
    n_range: Option<String>,
    p: Option<Scalar>,
    x: Option<Points>,
    eps: Option<Vec<f64>>,
    out: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
    normalized: Option<bool>,
    include_identity_gates: Option<bool>,
    with_quadrature: Option<bool>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub function: Option<KorobovTestFunction>,
    /// Set explicitly with `--d`, or implied by the function.
    pub d: Option<usize>,
    pub levels: Option<RangeInclusive<u32>>,
    pub norm: Option<Norm>,
    pub points: Vec<Vec<f64>>,
    pub eps: Vec<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub normalized: bool,
    pub include_identity_gates: bool,
    pub with_quadrature: bool,
    pub scale_coefficients: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn read_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| bad(format!("invalid config {}: {e}", path.display())))
}

pub fn parse_levels(spec: &str) -> Result<RangeInclusive<u32>, ConfigError> {
    let err = || bad(format!("invalid level range '{spec}', expected A..B"));
    let (a, b) = spec.split_once("..").ok_or_else(err)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let lo: u32 = a.trim().parse().map_err(|_| err())?;
    let hi: u32 = b.trim().parse().map_err(|_| err())?;
    if lo == 0 || hi < lo {
        return Err(bad(format!("level range '{spec}' must satisfy 1 <= A <= B")));
    }
    Ok(lo..=hi)
}

/// `"0.3,0.7;0.1,0.2"`; with `d = 1` a plain comma list is a list of points.
pub fn parse_points(spec: &str, d: usize) -> Result<Vec<Vec<f64>>, ConfigError> {
    let number = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| bad(format!("invalid coordinate '{}'", t.trim())))
    };
    if d == 1 && !spec.contains(';') {
        return spec
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| Ok(vec![number(t)?]))
            .collect();
    }
    spec.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|p| p.split(',').map(number).collect())
        .collect()
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, ConfigError> {
        let file = match &cli.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let command = cli.command.or(file.command).ok_or_else(|| bad("no command given"))?;

        let (function_name, expr) = if cli.function.is_some() || cli.expr.is_some() {
            (cli.function, cli.expr)
        } else {
            (file.function, file.expr)
        };
        let d_flag = cli.d.or(file.d);
        if d_flag == Some(0) {
            return Err(bad("d must be at least 1"));
        }
        let function = match (function_name, expr) {
            (Some(_), Some(_)) => return Err(bad("--fn and --expr are mutually exclusive")),
            (Some(name), None) => Some(
                KorobovTestFunction::by_name(&name, d_flag.unwrap_or(1))
                    .map_err(|e| bad(format!("--fn {name}: {e}")))?,
            ),
            (None, Some(spec)) => {
                let f = parse_expr(&spec).map_err(|e| bad(e.to_string()))?;
                if let Some(d) = d_flag {
                    if d != f.dim() {
                        return Err(bad(format!(
                            "--d {d} does not match the {} factors of '{spec}'",
                            f.dim()
                        )));
                    }
                }
                Some(f)
            }
            (None, None) => None,
        };
        let d = function.as_ref().map(|f| f.dim()).or(d_flag);

        let (n, n_range) = if cli.n.is_some() || cli.n_range.is_some() {
            (cli.n, cli.n_range)
        } else {
            (file.n, file.n_range)
        };
        let levels = match (n, n_range) {
            (Some(_), Some(_)) => return Err(bad("--n and --n-range are mutually exclusive")),
            (Some(0), None) => return Err(bad("n must be at least 1")),
            (Some(n), None) => Some(n..=n),
            (None, Some(r)) => Some(parse_levels(&r)?),
            (None, None) => None,
        };

        let norm = match cli.p.or_else(|| file.p.map(|s| s.text())) {
            Some(p) => Some(Norm::parse(&p).map_err(|_| bad(format!("invalid p '{p}': expected 2 <= p <= inf")))?),
            None => None,
        };

        let dim = d.unwrap_or(1);
        let points = match (cli.x, file.x) {
            (Some(s), _) | (None, Some(Points::Text(s))) => parse_points(&s, dim)?,
            (None, Some(Points::Flat(v))) if dim == 1 => v.into_iter().map(|t| vec![t]).collect(),
            (None, Some(Points::Flat(v))) => vec![v],
            (None, Some(Points::Nested(v))) => v,
            (None, None) => Vec::new(),
        };
        for x in &points {
            if x.len() != dim {
                return Err(bad(format!(
                    "point {x:?} has {} coordinates, expected d = {dim}",
                    x.len()
                )));
            }
            if let Some(t) = x.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                return Err(bad(format!("coordinate {t} outside [0, 1]")));
            }
        }

        let eps = match cli.eps {
            Some(list) => list
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(format!("invalid epsilon '{}'", t.trim())))
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => file.eps.unwrap_or_else(|| (1..=6).map(|k| 10f64.powi(-k)).collect()),
        };
        if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(bad(format!("epsilon {e} outside (0, 1)")));
        }

        let format = cli.format.or(file.format).unwrap_or(match command {
            Command::Eval | Command::Convergence | Command::Audit => Format::Csv,
            Command::Coeffs | Command::Resources | Command::Circuit => Format::Json,
        });
        let allowed = match command {
            Command::Convergence => true,
            Command::Circuit => format == Format::Json,
            _ => format != Format::Svg,
        };
        if !allowed {
            return Err(bad(
                format!("format {format:?} is not available for {command:?}").to_lowercase()
            ));
        }

        Ok(Self {
            command,
            function,
            d,
            levels,
            norm,
            points,
            eps,
            out: cli.out.or(file.out),
            format,
            seed: cli.seed.or(file.seed).unwrap_or(0),
            normalized: cli.normalized || file.normalized.unwrap_or(false),
            include_identity_gates: cli.include_identity_gates || file.include_identity_gates.unwrap_or(false),
            with_quadrature: cli.with_quadrature || file.with_quadrature.unwrap_or(false),
            scale_coefficients: cli.scale_coefficients,
        })
    }

    pub fn require_function(&self) -> Result<&KorobovTestFunction, ConfigError> {
        self.function
            .as_ref()
            .ok_or_else(|| bad("a function is required (--fn NAME or --expr SPEC)"))
    }

    pub fn levels_or(&self, default: RangeInclusive<u32>) -> RangeInclusive<u32> {
        self.levels.clone().unwrap_or(default)
    }

    /// The single level for commands that build one interpolant.
    pub fn single_level(&self, default: u32) -> Result<u32, ConfigError> {
        match &self.levels {
            None => Ok(default),
            Some(r) if r.start() == r.end() => Ok(*r.start()),
            Some(_) => Err(bad("this command takes a single level (--n N)")),
        }
    }
}
