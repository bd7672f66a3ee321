//! Zudilin's linear forms in `1, zeta(5), zeta(7), zeta(9), zeta(11)`, computed exactly.

mod direct;
mod form;
mod partial_fractions;
mod rational_function;

use thiserror::Error;

use crate::zeta::ZetaError;

pub use direct::{
    default_direct_digits, direct_sum, direct_sum_of, direct_sum_report, direct_sum_with_cutoff, DirectSum,
    SecondDerivative,
};
pub use form::{
    check_pipeline, common_denominator, evaluate_numeric, required_digits, sum_over_k, zudilin_linear_form,
    zudilin_pipeline, DenominatorReport, FormChecks, FormDocument, ZetaLinearForm, ZudilinPipeline, C0_REFERENCE,
    C1_REFERENCE, HEIGHT_EXPONENT, HEIGHT_SLACK_BITS, ZUDILIN_ORDER_RANGE, ZUDILIN_ZETA_ARGS,
};
pub use partial_fractions::{partial_fractions, reconstructs, sample_points, second_derivative, PartialFractionExpansion};
pub use rational_function::{build_zudilin, pole_spectrum, reflection_sign, FactoredRationalFunction, PochhammerFactor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinearFormError {
    #[error("index n must be at least 1, got {0}")]
    InvalidIndex(u64),
    #[error("n = {n} exceeds the configured budget (max {max})")]
    BudgetExceeded { n: u64, max: u64 },
    #[error("rational function is not proper: numerator degree {numerator_degree}, denominator degree {denominator_degree}")]
    NotProper { numerator_degree: u64, denominator_degree: u64 },
    #[error("term of order {j} at pole {m} diverges when summed over k")]
    DivergentOrder { m: i64, j: u32 },
    #[error("pole t = {m} lies inside the summation range")]
    PoleInSummationRange { m: i64 },
    #[error("coefficient of zeta({s}) should vanish but does not")]
    VanishingFailed { s: u32 },
    #[error("table has {have} digits, {need} required")]
    InsufficientPrecision { have: u32, need: u32 },
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error("direct summation did not converge by cutoff {cutoff}")]
    CutoffBudgetExceeded { cutoff: u64 },
    #[error("evaluation point is a pole")]
    PoleAtPoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFormConfig {
    pub max_n: u64,
    pub max_cutoff: u64,
}

impl Default for LinearFormConfig {
    fn default() -> Self {
        Self { max_n: 2, max_cutoff: 1 << 20 }
    }
}

impl LinearFormConfig {
    pub(crate) fn check_index(&self, n: u64) -> Result<(), LinearFormError> {
        if n < 1 {
            return Err(LinearFormError::InvalidIndex(n));
        }
        if n > self.max_n {
            return Err(LinearFormError::BudgetExceeded { n, max: self.max_n });
        }
        Ok(())
    }
}
