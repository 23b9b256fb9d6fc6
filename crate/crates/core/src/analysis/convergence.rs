//! Error-versus-grid-size studies and log-log slope fits.

use std::ops::RangeInclusive;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::corpus::KorobovTestFunction;
use super::norms::{lp_error, Norm};
use crate::sparsegrid::{evaluate_unchecked, grid_count, surplus_coefficients};
use crate::{Error, Result};

/// Rows with an error below this are rounding noise and are left out of fits.
pub const FIT_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: u32,
    /// Exact number of grid points.
    pub grid_points: u64,
    pub error_inf: f64,
    pub error_2: f64,
    /// Only for `2 < p < ∞`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_p: Option<f64>,
    /// Monte Carlo standard error of the finite-`p` column(s), when sampled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    /// Slope fitted over this row and all earlier ones.
    pub slope_running: Option<f64>,
}

impl ConvergenceRow {
    /// Error in the study's norm.
    pub fn error(&self, norm: Norm) -> f64 {
        match norm {
            Norm::Inf => self.error_inf,
            Norm::P(2.0) => self.error_2,
            Norm::P(_) => self.error_p.unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Points that entered the fit.
    pub points: usize,
    /// Two-sided 95% confidence interval; `None` with fewer than 3 points.
    pub ci: Option<(f64, f64)>,
}

/// Unweighted least squares of `y` on `x`, skipping pairs whose original
/// error is below [`FIT_FLOOR`] (the caller passes `log₂` values, so the
/// filter is applied to `2^y`). `None` with fewer than two usable points.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<SlopeFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(x, y)| x.is_finite() && y.is_finite() && y.exp2() >= FIT_FLOOR)
        .collect();
    let m = usable.len();
    if m < 2 {
        return None;
    }
    let mf = m as f64;
    let mean_x = usable.iter().map(|p| p.0).sum::<f64>() / mf;
    let mean_y = usable.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = usable.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ci = (m >= 3).then(|| {
        let rss: f64 = usable.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        let se = (rss / (mf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, mf - 2.0)
            .map(|dist| dist.inverse_cdf(0.975))
            .unwrap_or(1.96);
        (slope - t * se, slope + t * se)
    });
    Some(SlopeFit {
        slope,
        intercept,
        points: m,
        ci,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub function: String,
    pub d: usize,
    pub p: String,
    pub rows: Vec<ConvergenceRow>,
    pub slope: Option<f64>,
    pub slope_ci: Option<(f64, f64)>,
    /// Exponent `3(d − 1)` of the `log₂ N` factor in the rate.
    pub log_exponent: u32,
    /// Slope after dividing errors by `log₂^{3(d−1)} N` (reported, not gated).
    pub corrected_slope: Option<f64>,
    /// Smallest `c` with `error ≤ c · N^{−2} log₂^{3(d−1)} N` on every row.
    pub shape_constant: Option<f64>,
}

impl ConvergenceStudy {
    pub fn norm_errors(&self) -> Vec<f64> {
        let norm = Norm::parse(&self.p).unwrap_or(Norm::Inf);
        self.rows.iter().map(|r| r.error(norm)).collect()
    }
}

/// `N^{−2} log₂^{k} N`, or `None` where the model is degenerate (`N = 1`, `k > 0`).
pub fn rate_model(grid_points: u64, log_exponent: u32) -> Option<f64> {
    let n = grid_points as f64;
    let log = n.log2();
    if log_exponent > 0 && log <= 0.0 {
        return None;
    }
    Some(n.powi(-2) * log.powi(log_exponent as i32))
}

/// Interpolate `f` on each level in `levels` and measure the error in the
/// sup norm, the `L²` norm and, for `2 < p < ∞`, the `L^p` norm.
pub fn convergence_study(
    f: &KorobovTestFunction,
    norm: Norm,
    levels: RangeInclusive<u32>,
    seed: u64,
) -> Result<ConvergenceStudy> {
    if levels.is_empty() || *levels.start() == 0 {
        return Err(Error::EmptyRange);
    }
    let d = f.dim();
    let log_exponent = 3 * (d as u32 - 1);
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    let mut fit_points = Vec::new();
    for n in levels {
        let s = surplus_coefficients(|x| f.eval(x), n, d)?;
        let interp = |x: &[f64]| evaluate_unchecked(&s, x);
        let eval = |x: &[f64]| f.eval(x);
        let error_inf = lp_error(eval, interp, Norm::Inf, d, n, seed)?.value;
        let e2 = lp_error(eval, interp, Norm::P(2.0), d, n, seed)?;
        let (error_p, p_se) = match norm {
            Norm::P(p) if p != 2.0 => {
                let e = lp_error(eval, interp, norm, d, n, seed)?;
                (Some(e.value), e.std_error)
            }
            _ => (None, None),
        };
        let mut row = ConvergenceRow {
            n,
            grid_points: grid_count(n, d),
            error_inf,
            error_2: e2.value,
            error_p,
            std_error: p_se.or(e2.std_error),
            slope_running: None,
        };
        fit_points.push(((row.grid_points as f64).log2(), row.error(norm).log2()));
        row.slope_running = fit_slope(&fit_points).map(|fit| fit.slope);
        rows.push(row);
    }
    let fit = fit_slope(&fit_points);
    let corrected: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| {
            let log_n = (r.grid_points as f64).log2();
            (log_exponent == 0 || log_n > 0.0).then(|| {
                let e = r.error(norm);
                (log_n, e.log2() - log_exponent as f64 * log_n.log2())
            })
        })
        .filter(|&(_, y)| y.is_finite())
        .collect();
    let corrected_slope = fit_slope(&corrected).map(|fit| fit.slope);
    let shape_constant = rows
        .iter()
        .filter_map(|r| rate_model(r.grid_points, log_exponent).map(|m| r.error(norm) / m))
        .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.max(c))));
    Ok(ConvergenceStudy {
        function: f.name().to_string(),
        d,
        p: norm.label(),
        rows,
        slope: fit.map(|f| f.slope),
        slope_ci: fit.and_then(|f| f.ci),
        log_exponent,
        corrected_slope,
        shape_constant,
    })
}
