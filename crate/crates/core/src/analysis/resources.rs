//! Asymptotic width/depth bounds as functions of the target accuracy `ε`.
//!
//! Every hidden constant is set to 1, so outputs are in relative units: only
//! orderings and monotonicity are meaningful.

use serde::Serialize;

use super::lambert::lambert_w;
use super::norms::Norm;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaKind {
    /// `p ∈ {2, ∞}`.
    TwoOrInf,
    /// `2 < p < ∞` (also evaluable at `p = 2`).
    GeneralP,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResourceEstimate {
    pub epsilon: f64,
    pub d: usize,
    /// `p`, with `∞` serialized as `null`.
    pub p: Option<f64>,
    pub formula: FormulaKind,
    pub alpha: f64,
    pub beta: f64,
    pub lambert_w_argument: f64,
    pub lambert_w_value: f64,
    pub predicted_depth_bound: f64,
    pub predicted_width_bound: f64,
    pub simplified_depth_bound: f64,
    pub simplified_width_bound: f64,
}

/// `α = (3p − 1)/(2p − 1)`, with the `p → ∞` limit `3/2`.
pub fn alpha(norm: Norm) -> f64 {
    match norm {
        Norm::Inf => 1.5,
        Norm::P(p) => (3.0 * p - 1.0) / (2.0 * p - 1.0),
    }
}

fn check(epsilon: f64, d: usize) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonDomain(epsilon));
    }
    if d == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    Ok(())
}

/// Refined (`W`) and simplified (`W(x) ≤ x`) bounds: the `p ∈ {2, ∞}`
/// formulas for `p = 2` and `p = ∞`, the general-`p` ones otherwise.
pub fn resource_estimate(epsilon: f64, d: usize, norm: Norm) -> Result<ResourceEstimate> {
    match norm {
        Norm::Inf => two_or_inf_estimate(epsilon, d, norm),
        Norm::P(2.0) => two_or_inf_estimate(epsilon, d, norm),
        Norm::P(p) => general_p_estimate(epsilon, d, p),
    }
}

/// With `L = log₂^{3/2}(1/ε)` and `W = W(ε^{−1/d} L / d)`:
/// depth `d²(2L)^d W / (ε^{1/2} L)`, width `2d + dW`; simplified depth
/// `d ε^{−(1/2 + 1/d)} (2L)^d`, width `2d + ε^{−1/d} L`.
pub fn two_or_inf_estimate(epsilon: f64, d: usize, norm: Norm) -> Result<ResourceEstimate> {
    check(epsilon, d)?;
    let df = d as f64;
    let big_l = (1.0 / epsilon).log2().powf(1.5);
    let arg = epsilon.powf(-1.0 / df) * big_l / df;
    let w = lambert_w(arg)?;
    let a = alpha(norm);
    Ok(ResourceEstimate {
        epsilon,
        d,
        p: match norm {
            Norm::Inf => None,
            Norm::P(p) => Some(p),
        },
        formula: FormulaKind::TwoOrInf,
        alpha: a,
        beta: a * (df - 1.0),
        lambert_w_argument: arg,
        lambert_w_value: w,
        predicted_depth_bound: df * df * (2.0 * big_l).powi(d as i32) / (epsilon.sqrt() * big_l) * w,
        predicted_width_bound: 2.0 * df + df * w,
        simplified_depth_bound: df * epsilon.powf(-(0.5 + 1.0 / df)) * (2.0 * big_l).powi(d as i32),
        simplified_width_bound: 2.0 * df + epsilon.powf(-1.0 / df) * big_l,
    })
}

/// General `p ≥ 2` with `α = (3p−1)/(2p−1)`, `β = α(d−1)`, `q = p/(2p−1)`,
/// `ℓ = log₂(1/ε)` and `X = (6β log₂β)^α α^α ε^{−q/d} ℓ^α`:
/// depth `d² (12β log₂β)^β α^β ε^{−q} ℓ^β W(X/d)`, width `2d + d W(X/d)`;
/// simplified depth `d (12β log₂β)^{α+β} α^{α+β} ε^{−q(1+1/d)} ℓ^{α+β} ε^{−q/d}`
/// and width `2d + X`.
///
/// The bases `6β log₂β` and `12β log₂β` are clamped below at 1; they are
/// otherwise undefined or non-positive for `β ≤ 1` (in particular `d = 1`).
pub fn general_p_estimate(epsilon: f64, d: usize, p: f64) -> Result<ResourceEstimate> {
    check(epsilon, d)?;
    if !(p.is_finite() && p >= 2.0) {
        return Err(Error::InvalidNorm(p));
    }
    let df = d as f64;
    let a = alpha(Norm::P(p));
    let b = a * (df - 1.0);
    let q = p / (2.0 * p - 1.0);
    let lg = (1.0 / epsilon).log2();
    let blog = if b > 0.0 { b * b.log2() } else { 0.0 };
    let base6 = (6.0 * blog).max(1.0);
    let base12 = (12.0 * blog).max(1.0);
    let x = base6.powf(a) * a.powf(a) * epsilon.powf(-q / df) * lg.powf(a);
    let arg = x / df;
    let w = lambert_w(arg)?;
    Ok(ResourceEstimate {
        epsilon,
        d,
        p: Some(p),
        formula: FormulaKind::GeneralP,
        alpha: a,
        beta: b,
        lambert_w_argument: arg,
        lambert_w_value: w,
        predicted_depth_bound: df * df * base12.powf(b) * a.powf(b) * epsilon.powf(-q) * lg.powf(b) * w,
        predicted_width_bound: 2.0 * df + df * w,
        simplified_depth_bound: df
            * base12.powf(a + b)
            * a.powf(a + b)
            * epsilon.powf(-q * (1.0 + 1.0 / df))
            * lg.powf(a + b)
            * epsilon.powf(-q / df),
        simplified_width_bound: 2.0 * df + x,
    })
}
