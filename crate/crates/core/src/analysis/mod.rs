//! Test corpus, error norms, convergence studies, coefficient audits and
//! asymptotic resource estimates.

mod audit;
mod convergence;
mod corpus;
mod lambert;
mod norms;
mod resources;

pub use audit::{
    coefficient_bound_audit, dual_oracle_comparison, integral_coefficient, local_seminorm_2, quadrature_surpluses,
    AuditReport, BoundKind, BoundViolation, DualOracleReport, AUDIT_SLACK,
};
pub use convergence::{
    convergence_study, fit_slope, rate_model, ConvergenceRow, ConvergenceStudy, SlopeFit, FIT_FLOOR,
};
pub use corpus::{corpus, parse_expr, Factor, KorobovTestFunction};
pub use lambert::lambert_w;
pub use norms::{lp_error, ErrorEstimate, Norm, MC_SAMPLES};
pub use resources::{general_p_estimate, resource_estimate, two_or_inf_estimate, FormulaKind, ResourceEstimate};
