//! Coefficient decay bounds and the integral-formula cross-check.

use serde::Serialize;

use super::corpus::KorobovTestFunction;
use crate::quadrature::{composite_1d, integrate_tensor};
use crate::sparsegrid::{GridIndex, SurplusMap};
use crate::Result;

/// Relative slack allowed on `|v| ≤ bound` to absorb rounding in `v`.
pub const AUDIT_SLACK: f64 = 1e-12;

/// Gauss–Legendre nodes per support cell per dimension for the coefficient
/// integral.
const COEFF_NODES: usize = 32;
/// Same, for the local `L²` semi-norm.
const SEMINORM_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `|v| ≤ 2^{−d−2‖ℓ‖₁} |f|_{2,∞}`
    Sup,
    /// `|v| ≤ 2^{−d}(2/3)^{d/2} 2^{−(3/2)‖ℓ‖₁} |f·1_supp|_{2,2}`
    L2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundViolation {
    pub level: Vec<u32>,
    pub index: Vec<u64>,
    pub bound: BoundKind,
    pub value: f64,
    pub limit: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub function: String,
    pub d: usize,
    pub n: u32,
    pub checked: usize,
    /// Largest `|v| / bound` for the sup-norm bound (0 when vacuous).
    pub max_ratio_sup: f64,
    pub max_ratio_l2: f64,
    pub violations: Vec<BoundViolation>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn support_rules(g: &GridIndex, nodes: usize) -> Vec<Vec<(f64, f64)>> {
    g.support()
        .into_iter()
        .map(|(lo, hi)| composite_1d(lo, hi, 2, nodes))
        .collect()
}

/// `|f·1_supp(φ_{ℓ,i})|_{2,2}`: the `L²` norm of the mixed derivative over
/// the support box.
pub fn local_seminorm_2(f: &KorobovTestFunction, g: &GridIndex) -> f64 {
    integrate_tensor(&support_rules(g, SEMINORM_NODES), |x| f.mixed_derivative(x).powi(2)).sqrt()
}

/// `v_{ℓ,i} = ∫ ∏_j (−2^{−(ℓ_j+1)} φ_{ℓ_j,i_j}(x_j)) ∂^{2d}f(x) dx`, by
/// composite Gauss–Legendre on the two linear pieces of each hat.
pub fn integral_coefficient(f: &KorobovTestFunction, g: &GridIndex) -> f64 {
    let scale: f64 = g
        .level()
        .levels()
        .iter()
        .map(|&l| -(-(l as f64 + 1.0)).exp2())
        .product();
    let integral = integrate_tensor(&support_rules(g, COEFF_NODES), |x| {
        crate::sparsegrid::scaled_hat(g, x) * f.mixed_derivative(x)
    });
    scale * integral
}

/// Surplus map filled from the integral formula.
pub fn quadrature_surpluses(f: &KorobovTestFunction, n: u32) -> Result<SurplusMap> {
    let mut map = SurplusMap::zeros(n, f.dim());
    let keys: Vec<GridIndex> = map.entries().map(|(g, _)| g).collect();
    for g in keys {
        map.set(&g, integral_coefficient(f, &g))?;
    }
    Ok(map)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualOracleReport {
    pub function: String,
    pub d: usize,
    pub n: u32,
    pub max_abs_diff: f64,
    pub worst_level: Vec<u32>,
    pub worst_index: Vec<u64>,
}

/// Largest `|stencil − integral|` over the map.
pub fn dual_oracle_comparison(f: &KorobovTestFunction, stencil: &SurplusMap) -> DualOracleReport {
    let mut report = DualOracleReport {
        function: f.name().to_string(),
        d: stencil.dim(),
        n: stencil.level(),
        max_abs_diff: 0.0,
        worst_level: Vec::new(),
        worst_index: Vec::new(),
    };
    for (g, v) in stencil.entries() {
        let diff = (v - integral_coefficient(f, &g)).abs();
        if diff >= report.max_abs_diff {
            report.max_abs_diff = diff;
            report.worst_level = g.level().levels().to_vec();
            report.worst_index = g.index().to_vec();
        }
    }
    report
}

/// Check both decay bounds on every coefficient of `s`.
pub fn coefficient_bound_audit(f: &KorobovTestFunction, s: &SurplusMap) -> AuditReport {
    let d = s.dim() as i32;
    let sup = f.seminorm_inf();
    let mut report = AuditReport {
        function: f.name().to_string(),
        d: s.dim(),
        n: s.level(),
        checked: 0,
        max_ratio_sup: 0.0,
        max_ratio_l2: 0.0,
        violations: Vec::new(),
    };
    for (g, v) in s.entries() {
        report.checked += 1;
        let l1 = g.level().l1() as f64;
        let sup_limit = (-(d as f64) - 2.0 * l1).exp2() * sup;
        let l2_limit =
            (-(d as f64)).exp2() * (2.0f64 / 3.0).powf(d as f64 / 2.0) * (-1.5 * l1).exp2() * local_seminorm_2(f, &g);
        for (kind, limit) in [(BoundKind::Sup, sup_limit), (BoundKind::L2, l2_limit)] {
            let ratio = if limit > 0.0 {
                v.abs() / limit
            } else if v == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            match kind {
                BoundKind::Sup => report.max_ratio_sup = report.max_ratio_sup.max(ratio),
                BoundKind::L2 => report.max_ratio_l2 = report.max_ratio_l2.max(ratio),
            }
            if ratio > 1.0 + AUDIT_SLACK {
                report.violations.push(BoundViolation {
                    level: g.level().levels().to_vec(),
                    index: g.index().to_vec(),
                    bound: kind,
                    value: v,
                    limit,
                    ratio,
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparsegrid::surplus_coefficients;
    use approx::assert_abs_diff_eq;

    fn quad1() -> KorobovTestFunction {
        KorobovTestFunction::by_name("prod-quad", 1).unwrap()
    }

    #[test]
    fn equality_witness() {
        let f = quad1();
        let s = surplus_coefficients(|x| f.eval(x), 2, 1).unwrap();
        let r = coefficient_bound_audit(&f, &s);
        assert!(r.passed());
        assert_eq!(r.max_ratio_sup, 1.0);
        assert_eq!(r.checked, 3);
    }

    #[test]
    fn zero_is_vacuous() {
        let f = KorobovTestFunction::zero(2);
        let s = surplus_coefficients(|x| f.eval(x), 3, 2).unwrap();
        let r = coefficient_bound_audit(&f, &s);
        assert!(r.passed());
        assert_eq!(r.max_ratio_sup, 0.0);
    }

    #[test]
    fn scaled_coefficients_fail() {
        let f = quad1();
        let s = surplus_coefficients(|x| f.eval(x), 2, 1).unwrap().scaled(1.1);
        let r = coefficient_bound_audit(&f, &s);
        assert!(!r.passed());
        assert!(r
            .violations
            .iter()
            .any(|v| v.level == vec![1] && v.index == vec![1] && v.bound == BoundKind::Sup));
    }

    #[test]
    fn integral_formula_fixture() {
        let f = quad1();
        let g = GridIndex::new(crate::sparsegrid::LevelVector::new(vec![2]).unwrap(), vec![1]).unwrap();
        assert_abs_diff_eq!(integral_coefficient(&f, &g), 1.0 / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn local_seminorm_of_quadratic() {
        // |f''| = 2 on a support of width 2^{1−ℓ}
        let f = quad1();
        let g = GridIndex::new(crate::sparsegrid::LevelVector::new(vec![3]).unwrap(), vec![5]).unwrap();
        assert_abs_diff_eq!(local_seminorm_2(&f, &g), 2.0 * 0.25f64.sqrt(), epsilon = 1e-14);
    }
}
