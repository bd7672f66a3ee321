//! Dimension and approximation-exponent bounds from the growth of linear forms.

use serde::Serialize;
use thiserror::Error;

use num_traits::{One, Signed};

use crate::exact::{rat_to_string, BigRat};
use crate::oscillation::{build_plan_general, hypothesis_multi, AnglePair, OscillationError, PlanMode};

/// Decay constant of `|S_n|` for Zudilin's forms, as printed.
pub const ZUDILIN_C0: f64 = 227.580_196_41;
/// Growth constant of the common denominators, as printed.
pub const ZUDILIN_C1: f64 = 226.249_442_66;
/// One unit in the last printed place of the constants.
pub const CONSTANT_ULP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriterionError {
    #[error("domain violation: {0}")]
    Domain(String),
    #[error(transparent)]
    Oscillation(#[from] OscillationError),
}

/// `|form_n| ≈ alpha^n` and coefficients `≈ beta^n`, kept as logarithms so that
/// large `beta` stays representable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthData {
    pub ln_alpha: f64,
    pub ln_beta: f64,
}

impl GrowthData {
    pub fn from_logs(ln_alpha: f64, ln_beta: f64) -> Result<Self, CriterionError> {
        if !(ln_alpha.is_finite() && ln_beta.is_finite()) {
            return Err(CriterionError::Domain("logarithms must be finite".into()));
        }
        if ln_alpha >= 0.0 {
            return Err(CriterionError::Domain(format!("alpha must lie in (0, 1), ln alpha = {ln_alpha}")));
        }
        if ln_beta <= 0.0 {
            return Err(CriterionError::Domain(format!("beta must exceed 1, ln beta = {ln_beta}")));
        }
        Ok(Self { ln_alpha, ln_beta })
    }

    pub fn from_alpha_beta(alpha: f64, beta: f64) -> Result<Self, CriterionError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(CriterionError::Domain(format!("alpha = {alpha} is not in (0, 1)")));
        }
        if !(beta > 1.0) {
            return Err(CriterionError::Domain(format!("beta = {beta} is not greater than 1")));
        }
        Self::from_logs(alpha.ln(), beta.ln())
    }

    /// `alpha = e^(C1 - C0)`, `beta = e^C1 2^bits`.
    pub fn from_constants(c0: f64, c1: f64, bits: u64) -> Result<Self, CriterionError> {
        if !(c0 > c1) {
            return Err(CriterionError::Domain(format!("need C0 > C1, got C0 = {c0}, C1 = {c1}")));
        }
        Self::from_logs(c1 - c0, c1 + bits as f64 * std::f64::consts::LN_2)
    }

    /// `(alpha^lambda, beta^lambda)`.
    pub fn powered(&self, lambda: f64) -> Self {
        Self { ln_alpha: self.ln_alpha * lambda, ln_beta: self.ln_beta * lambda }
    }

    pub fn alpha(&self) -> f64 {
        self.ln_alpha.exp()
    }

    pub fn beta(&self) -> f64 {
        self.ln_beta.exp()
    }
}

/// `1 - ln(alpha) / ln(beta)`.
pub fn dimension_bound(g: &GrowthData) -> f64 {
    1.0 - g.ln_alpha / g.ln_beta
}

/// Smallest integer dimension the real bound forces.
pub fn dimension_bound_ceiled(g: &GrowthData) -> u64 {
    dimension_bound(g).ceil() as u64
}

/// `1 - ln(beta) / ln(alpha)`: every larger `kappa` is an admissible exponent.
pub fn exponent_threshold(g: &GrowthData) -> f64 {
    1.0 - g.ln_beta / g.ln_alpha
}

fn check_exact_logs(ln_alpha: &BigRat, ln_beta: &BigRat) -> Result<(), CriterionError> {
    if !ln_alpha.is_negative() || !ln_beta.is_positive() {
        return Err(CriterionError::Domain(format!("need ln alpha < 0 < ln beta, got {ln_alpha} and {ln_beta}")));
    }
    Ok(())
}

/// [`dimension_bound`] for exactly known rational logarithms.
pub fn dimension_bound_exact(ln_alpha: &BigRat, ln_beta: &BigRat) -> Result<BigRat, CriterionError> {
    check_exact_logs(ln_alpha, ln_beta)?;
    Ok(BigRat::one() - ln_alpha / ln_beta)
}

/// [`exponent_threshold`] for exactly known rational logarithms.
pub fn exponent_threshold_exact(ln_alpha: &BigRat, ln_beta: &BigRat) -> Result<BigRat, CriterionError> {
    check_exact_logs(ln_alpha, ln_beta)?;
    Ok(BigRat::one() - ln_beta / ln_alpha)
}

/// `3 (27 + 37 + 27) + sum_{j=1}^{10} (13 + 2j)`.
pub fn zudilin_height_identity() -> u64 {
    3 * (27 + 37 + 27) + (1..=10u64).map(|j| 13 + 2 * j).sum::<u64>()
}

pub const ZUDILIN_HEIGHT_BITS: u64 = 513;

pub fn zudilin_constants() -> GrowthData {
    let bits = zudilin_height_identity();
    assert_eq!(bits, ZUDILIN_HEIGHT_BITS, "height identity");
    GrowthData::from_constants(ZUDILIN_C0, ZUDILIN_C1, bits).expect("printed constants are in range")
}

/// Range of [`exponent_threshold`] over `C0, C1` within one printed unit.
pub fn zudilin_kappa_interval() -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for dc0 in [-CONSTANT_ULP, CONSTANT_ULP] {
        for dc1 in [-CONSTANT_ULP, CONSTANT_ULP] {
            let g = GrowthData::from_constants(ZUDILIN_C0 + dc0, ZUDILIN_C1 + dc1, ZUDILIN_HEIGHT_BITS).expect("in range");
            let k = exponent_threshold(&g);
            lo = lo.min(k);
            hi = hi.max(k);
        }
    }
    (lo, hi)
}

/// `kappa` rounded up to `places` decimals, the form in which an exponent is stated.
pub fn published_exponent(kappa: f64, places: i32) -> f64 {
    let s = 10f64.powi(places);
    (kappa * s).ceil() / s
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub hypothesis_ok: bool,
    pub dim_lower_bound: Option<f64>,
    pub dim_lower_bound_ceiled: Option<u64>,
    pub kappa_threshold: Option<f64>,
    pub plan_mode: Option<PlanMode>,
    /// The subsequence density reciprocal, as an exact rational string.
    pub lambda_used: Option<String>,
    /// Largest relative change of either bound when `(alpha, beta)` is replaced
    /// by `(alpha^lambda, beta^lambda)`.
    pub lambda_invariance_delta: Option<f64>,
    pub growth: GrowthData,
}

/// Runs the hypothesis check and plan for `pairs`, then reports the bounds for
/// `(alpha, beta)`; the subsequence rescales both logarithms by `lambda`, which
/// cancels in each ratio.
pub fn oscillating_report(g: &GrowthData, pairs: &[AnglePair]) -> Result<CriterionReport, CriterionError> {
    if !hypothesis_multi(pairs)? {
        return Ok(CriterionReport {
            hypothesis_ok: false,
            dim_lower_bound: None,
            dim_lower_bound_ceiled: None,
            kappa_threshold: None,
            plan_mode: None,
            lambda_used: None,
            lambda_invariance_delta: None,
            growth: *g,
        });
    }
    let plan = build_plan_general(pairs, None)?;
    let lambda = plan.lambda_f64();
    let sub = g.powered(lambda);
    let rel = |a: f64, b: f64| ((a - b) / a).abs();
    let delta = rel(dimension_bound(g), dimension_bound(&sub)).max(rel(exponent_threshold(g), exponent_threshold(&sub)));
    Ok(CriterionReport {
        hypothesis_ok: true,
        dim_lower_bound: Some(dimension_bound(g)),
        dim_lower_bound_ceiled: Some(dimension_bound_ceiled(g)),
        kappa_threshold: Some(exponent_threshold(g)),
        plan_mode: Some(plan.mode),
        lambda_used: Some(rat_to_string(&plan.lambda_predicted)),
        lambda_invariance_delta: Some(delta),
        growth: *g,
    })
}
