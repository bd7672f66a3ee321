use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::partial_fractions::{partial_fractions, reconstructs, sample_points, second_derivative, PartialFractionExpansion};
use super::rational_function::{build_zudilin, reflection_sign, FactoredRationalFunction};
use super::{LinearFormConfig, LinearFormError};
use crate::exact::{harmonic_power_sums_upto, lcm_denominators, log2_abs, log2_big, rat_to_string, BigRat};
use crate::highprec::HighPrecReal;
use crate::zeta::ZetaTable;

/// Zeta arguments allowed to survive in the Zudilin form.
pub const ZUDILIN_ZETA_ARGS: [u32; 4] = [5, 7, 9, 11];
/// Range of zeta arguments produced after differentiation (orders 3..=12).
pub const ZUDILIN_ORDER_RANGE: std::ops::RangeInclusive<u32> = 3..=12;
/// Exponent in the coefficient bound `2^(513 n + o(n))`.
pub const HEIGHT_EXPONENT: u64 = 513;
/// Published growth constant of the common denominators, `D_n = e^(C1 n + o(n))`.
pub const C1_REFERENCE: f64 = 226.249_442_66;
/// Published decay constant, `|S_n| = e^(-C0 n + o(n))`.
pub const C0_REFERENCE: f64 = 227.580_196_41;

/// `ell0 + sum_s ell_s zeta(s)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ZetaLinearForm {
    pub n: u64,
    pub ell0: BigRat,
    pub coefficients: BTreeMap<u32, BigRat>,
}

impl ZetaLinearForm {
    pub fn coefficient(&self, s: u32) -> BigRat {
        self.coefficients.get(&s).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn all_coefficients(&self) -> impl Iterator<Item = &BigRat> {
        std::iter::once(&self.ell0).chain(self.coefficients.values())
    }

    pub fn scaled(&self, c: &BigRat) -> Self {
        Self {
            n: self.n,
            ell0: &self.ell0 * c,
            coefficients: self.coefficients.iter().map(|(s, v)| (*s, v * c)).collect(),
        }
    }

    /// `log2 max |ell|` over all coefficients.
    pub fn log2_height(&self) -> f64 {
        self.all_coefficients()
            .filter(|c| !c.is_zero())
            .map(log2_abs)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `sum_{k>=1} sum_{(m,j)} a_{j,m} (k+m)^-j` as a zeta form, using
/// `sum_{k>=1} (k+m)^-s = zeta(s) - H_m^(s)`.
pub fn sum_over_k(p: &PartialFractionExpansion) -> Result<ZetaLinearForm, LinearFormError> {
    let mut by_order: BTreeMap<u32, i64> = BTreeMap::new();
    for &(m, j) in p.terms.keys() {
        if j <= 1 {
            return Err(LinearFormError::DivergentOrder { m, j });
        }
        if m < 0 {
            return Err(LinearFormError::PoleInSummationRange { m });
        }
        let e = by_order.entry(j).or_insert(0);
        *e = (*e).max(m);
    }
    let harmonics: BTreeMap<u32, Vec<BigRat>> = by_order
        .iter()
        .map(|(&s, &max_m)| (s, harmonic_power_sums_upto(max_m as u64, s)))
        .collect();
    let mut form = ZetaLinearForm::default();
    for (&(m, s), a) in &p.terms {
        *form.coefficients.entry(s).or_insert_with(BigRat::zero) += a;
        let h = &harmonics[&s][m as usize];
        if !h.is_zero() {
            form.ell0 -= a * h;
        }
    }
    Ok(form)
}

/// Full pipeline: factored integrand, partial fractions, second derivative,
/// summation over `k >= 1`. The scalar prefactor is stripped before the
/// decomposition and applied to the final coefficients.
pub fn zudilin_linear_form(n: u64, config: &LinearFormConfig) -> Result<ZetaLinearForm, LinearFormError> {
    Ok(zudilin_pipeline(n, config)?.form)
}

/// Intermediate products of [`zudilin_linear_form`], kept for the checks.
#[derive(Debug, Clone)]
pub struct ZudilinPipeline {
    pub function: FactoredRationalFunction,
    pub expansion: PartialFractionExpansion,
    pub form: ZetaLinearForm,
}

pub fn zudilin_pipeline(n: u64, config: &LinearFormConfig) -> Result<ZudilinPipeline, LinearFormError> {
    config.check_index(n)?;
    let f = build_zudilin(n)?;
    let unit = FactoredRationalFunction { scalar: BigRat::from_integer(1.into()), ..f.clone() };
    let expansion = partial_fractions(&unit)?;
    let mut form = sum_over_k(&second_derivative(&expansion))?.scaled(&f.scalar);
    form.n = n;
    for s in ZUDILIN_ORDER_RANGE {
        form.coefficients.entry(s).or_insert_with(BigRat::zero);
    }
    for (s, c) in &form.coefficients {
        if !ZUDILIN_ZETA_ARGS.contains(s) && !c.is_zero() {
            return Err(LinearFormError::VanishingFailed { s: *s });
        }
    }
    Ok(ZudilinPipeline { expansion: expansion.scaled(&f.scalar), function: f, form })
}

/// Digits needed for `evaluate_numeric` on the `n`-th form:
/// `ceil(154.5 n + 99 n + 60)`, covering a `2^(513 n)` coefficient height,
/// an `e^(-227.58 n)` result and 60 digits of margin.
pub fn required_digits(n: u64) -> u32 {
    ((154.5 + 99.0) * n as f64 + 60.0).ceil() as u32
}

/// `ell0 + sum ell_s zeta(s)` with the table's error bounds propagated.
pub fn evaluate_numeric(form: &ZetaLinearForm, table: &ZetaTable) -> Result<HighPrecReal, LinearFormError> {
    let need = required_digits(form.n);
    if table.digits() < need {
        return Err(LinearFormError::InsufficientPrecision { have: table.digits(), need });
    }
    let digits = table.digits();
    let mut acc = HighPrecReal::from_rat(&form.ell0, digits);
    for (&s, c) in &form.coefficients {
        if c.is_zero() {
            continue;
        }
        acc = &acc + &table.get(s)?.mul_rat(c);
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenominatorReport {
    pub denominator: String,
    pub log_denominator: f64,
    /// `ln(D_n) / n`, to compare with [`C1_REFERENCE`] (asymptotic only).
    pub log_denominator_per_n: f64,
    pub c1_reference: f64,
}

/// Least common multiple of all coefficient denominators.
pub fn common_denominator(form: &ZetaLinearForm) -> (BigInt, DenominatorReport) {
    let d = lcm_denominators(form.all_coefficients());
    let ln = log2_big(&d) * std::f64::consts::LN_2;
    let per_n = if form.n > 0 { ln / form.n as f64 } else { f64::NAN };
    let report = DenominatorReport {
        denominator: d.to_string(),
        log_denominator: ln,
        log_denominator_per_n: per_n,
        c1_reference: C1_REFERENCE,
    };
    (d, report)
}

/// Structural checks on a computed Zudilin form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormChecks {
    /// All coefficients outside zeta(5), zeta(7), zeta(9), zeta(11) are zero.
    pub vanishing: bool,
    /// The expansion matches the factored integrand at the sample points.
    pub reconstruction: bool,
    pub reconstruction_points: usize,
    /// Sign `s` with `R(-37n - t) = s R(t)` at the sample points, if any.
    pub reflection_sign: Option<i8>,
    pub log2_height: f64,
    pub log2_height_per_n: f64,
    pub height_exponent: u64,
    /// Allowed excess of `log2_height` over `513 n`, in bits.
    pub height_slack_bits: f64,
    pub height_within_bound: bool,
    /// `D_n * ell` is integral for every coefficient.
    pub denominator_clears: bool,
}

/// Excess over `513 n` bits tolerated before the height check reports failure.
pub const HEIGHT_SLACK_BITS: f64 = 64.0;

pub fn check_pipeline(p: &ZudilinPipeline) -> FormChecks {
    let n = p.form.n;
    let points = p.expansion.max_order() as usize + 2;
    let samples = sample_points(points.max(5));
    let reconstruction = reconstructs(&p.function, &p.expansion, &samples);
    let axis = BigRat::from_integer(BigInt::from(-37 * n as i64));
    let reflection = reflection_sign(&p.function, &axis, &samples);
    let height = p.form.log2_height();
    let (d, _) = common_denominator(&p.form);
    let clears = p
        .form
        .all_coefficients()
        .all(|c| (c * BigRat::from_integer(d.clone())).is_integer());
    let vanishing = p
        .form
        .coefficients
        .iter()
        .all(|(s, c)| ZUDILIN_ZETA_ARGS.contains(s) || c.is_zero());
    FormChecks {
        vanishing,
        reconstruction,
        reconstruction_points: samples.len(),
        reflection_sign: reflection,
        log2_height: height,
        log2_height_per_n: height / n as f64,
        height_exponent: HEIGHT_EXPONENT,
        height_slack_bits: HEIGHT_SLACK_BITS,
        height_within_bound: height <= (HEIGHT_EXPONENT * n) as f64 + HEIGHT_SLACK_BITS,
        denominator_clears: clears,
    }
}

/// JSON shape of a computed form; every exact number is a decimal string.
#[derive(Debug, Clone, Serialize)]
pub struct FormDocument {
    pub n: u64,
    pub ell0: String,
    pub coeffs: BTreeMap<String, String>,
    pub denominator: String,
    pub log2_height: f64,
    pub checks: FormChecks,
}

impl ZetaLinearForm {
    pub fn to_document(&self, checks: FormChecks) -> FormDocument {
        let (d, _) = common_denominator(self);
        FormDocument {
            n: self.n,
            ell0: rat_to_string(&self.ell0),
            coeffs: self
                .coefficients
                .iter()
                .map(|(s, c)| (format!("{s:02}"), rat_to_string(c)))
                .collect(),
            denominator: d.to_string(),
            log2_height: self.log2_height(),
            checks,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    fn pfe(entries: &[((i64, u32), BigRat)]) -> PartialFractionExpansion {
        PartialFractionExpansion { terms: entries.iter().cloned().collect() }
    }

    #[test]
    fn sum_over_k_examples() {
        let f = sum_over_k(&pfe(&[((0, 3), rat_int(1))])).unwrap();
        assert_eq!(f.coefficient(3), rat_int(1));
        assert_eq!(f.ell0, rat_int(0));

        let f = sum_over_k(&pfe(&[((2, 3), rat_int(2))])).unwrap();
        assert_eq!(f.coefficient(3), rat_int(2));
        assert_eq!(f.ell0, rat(-9, 4));

        let f = sum_over_k(&pfe(&[((1, 2), rat_int(1)), ((0, 2), rat_int(-1))])).unwrap();
        assert_eq!(f.coefficient(2), rat_int(0));
        assert_eq!(f.ell0, rat_int(-1));
    }

    #[test]
    fn sum_over_k_rejects_divergence() {
        assert_eq!(
            sum_over_k(&pfe(&[((1, 1), rat_int(1))])),
            Err(LinearFormError::DivergentOrder { m: 1, j: 1 })
        );
        assert_eq!(
            sum_over_k(&pfe(&[((-2, 3), rat_int(1))])),
            Err(LinearFormError::PoleInSummationRange { m: -2 })
        );
    }

    #[test]
    fn denominator_examples() {
        let mut f = ZetaLinearForm { n: 1, ell0: rat_int(3), ..Default::default() };
        f.coefficients.insert(5, rat_int(-7));
        assert_eq!(common_denominator(&f).0, BigInt::from(1));
        let mut g = ZetaLinearForm { n: 1, ell0: rat(1, 6), ..Default::default() };
        g.coefficients.insert(5, rat(1, 4));
        assert_eq!(common_denominator(&g).0, BigInt::from(12));
    }

    #[test]
    fn required_digits_rule() {
        assert_eq!(required_digits(1), 314);
        assert_eq!(required_digits(2), 567);
        assert_eq!(required_digits(0), 60);
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = LinearFormConfig::default();
        assert_eq!(
            zudilin_linear_form(3, &cfg),
            Err(LinearFormError::BudgetExceeded { n: 3, max: 2 })
        );
        assert_eq!(zudilin_linear_form(0, &cfg), Err(LinearFormError::InvalidIndex(0)));
    }

    #[test]
    fn zudilin_n1_shape() {
        let p = zudilin_pipeline(1, &LinearFormConfig::default()).unwrap();
        for s in [3, 4, 6, 8, 10, 12] {
            assert!(p.form.coefficient(s).is_zero(), "zeta({s})");
        }
        for s in ZUDILIN_ZETA_ARGS {
            assert!(!p.form.coefficient(s).is_zero(), "zeta({s})");
        }
        assert!(!p.form.ell0.is_zero());
        let checks = check_pipeline(&p);
        assert!(checks.vanishing && checks.reconstruction && checks.denominator_clears);
        assert!(checks.height_within_bound, "log2 height {}", checks.log2_height);
        assert_eq!(checks.reflection_sign, Some(-1));
    }
}
