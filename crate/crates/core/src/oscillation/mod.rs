//! Oscillating subsequences: `psi` with `|cos(psi(n) omega_i + phi_i)| >= epsilon`
//! and `psi(n) / n -> lambda`, built from Kronecker–Weyl equidistribution.

mod angle;
mod density;
mod hypothesis;
mod plan;

use thiserror::Error;

pub use angle::{parse_angle_expr, Angle, AngleExpr, AnglePair, PiLinear, DEFAULT_ANGLE_DIGITS, MIN_ANGLE_DIGITS};
pub use density::{kw_density, DensityReport, MIN_DENSITY_DIGITS};
pub use hypothesis::{
    congruent_mod_pi, detect_pi_rational, detect_pi_rational_default, hypothesis_multi, hypothesis_single,
    rational_approximation, PiRationalWitness, CONGRUENCE_TOL_LOG10, DEFAULT_D_MAX, DEFAULT_RATIONAL_TOL_LOG10,
};
pub use plan::{
    abs_cos_at, build_plan_general, build_plan_single, enumerate_psi, verify_plan, PlanMode, Relations,
    SubsequencePlan, TorusBox, VerifyReport, BOUNDARY_TIE_LOG10, ETA_GRID, LAMBDA_REL_TOL, MAX_GENERATORS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OscillationError {
    #[error("cannot parse angle {0}")]
    Parse(String),
    #[error("precision {have} digits is below the minimum {min}")]
    PrecisionTooLow { have: u32, min: u32 },
    #[error("undecidable at working precision: {0}")]
    Undecidable(String),
    #[error("hypothesis of the oscillation construction is violated")]
    HypothesisViolated,
    #[error("no angle pairs given")]
    NoPairs,
    #[error("no torus box found down to the smallest half-width")]
    NoBoxFound,
    #[error("inconsistent relation data: {0}")]
    InconsistentRelations(String),
    #[error("{0} generators exceed the box-search limit")]
    TooManyGenerators(usize),
    #[error("malformed box: {0}")]
    MalformedBox(String),
}
