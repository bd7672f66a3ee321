use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::rational_function::{build_zudilin, FactoredRationalFunction};
use super::{LinearFormConfig, LinearFormError};
use crate::exact::BigRat;
use crate::highprec::{HighPrecReal, GUARD_DIGITS};

/// Safety factor on the measured tail constant.
const TAIL_SAFETY_LOG10: f64 = 4.0;
const INITIAL_CUTOFF: u64 = 64;

/// Digits used for `direct_sum` when the caller does not ask for more:
/// enough to resolve `S_n` (about `e^(-227.6 n)`) with 60 digits to spare.
pub fn default_direct_digits(n: u64) -> u32 {
    (99.0 * n as f64).ceil() as u32 + 60
}

/// `sum_{k>=1} d^2/dt^2 R(t) |_{t=k}` for the Zudilin integrand.
pub fn direct_sum(n: u64, digits: u32, config: &LinearFormConfig) -> Result<HighPrecReal, LinearFormError> {
    config.check_index(n)?;
    direct_sum_of(&build_zudilin(n)?, digits, config.max_cutoff)
}

/// Result of a tail-controlled direct summation.
#[derive(Debug, Clone)]
pub struct DirectSum {
    pub value: HighPrecReal,
    pub cutoff: u64,
    /// `log10` of the tail bound added to the error.
    pub tail_log10: f64,
}

/// Sums `R''(k)` for `k = 1..K`, doubling `K` until the measured tail bound
/// `C 10^4 K^(1-p) / (p-1)` with `p = deg Q - deg P + 2` drops below `10^-digits`.
pub fn direct_sum_of(f: &FactoredRationalFunction, digits: u32, max_cutoff: u64) -> Result<HighPrecReal, LinearFormError> {
    Ok(direct_sum_report(f, digits, max_cutoff)?.value)
}

pub fn direct_sum_report(f: &FactoredRationalFunction, digits: u32, max_cutoff: u64) -> Result<DirectSum, LinearFormError> {
    if !f.is_proper() {
        return Err(LinearFormError::NotProper {
            numerator_degree: f.numerator_degree(),
            denominator_degree: f.denominator_degree(),
        });
    }
    let p = (f.denominator_degree() - f.numerator_degree() + 2) as f64;
    let work = digits + GUARD_DIGITS;
    let eval = SecondDerivative::new(f);
    let mut acc = HighPrecReal::zero(work);
    let mut mags: Vec<f64> = Vec::new();
    let mut k = 0u64;
    let mut cutoff = INITIAL_CUTOFF.min(max_cutoff);
    loop {
        while k < cutoff {
            k += 1;
            let term = HighPrecReal::from_rat(&eval.at(k)?, work);
            mags.push(term.log10_abs());
            acc = &acc + &term;
        }
        // C = max |term_k| k^p over the upper half of the range
        let log_c = ((cutoff / 2 + 1)..=cutoff)
            .map(|i| mags[i as usize - 1] + p * (i as f64).log10())
            .fold(f64::NEG_INFINITY, f64::max);
        let tail = log_c + TAIL_SAFETY_LOG10 + (1.0 - p) * (cutoff as f64).log10() - (p - 1.0).log10();
        if tail < -(digits as f64) - 1.0 || log_c == f64::NEG_INFINITY {
            let bound_ulps = if tail.is_finite() {
                let scaled = tail + work as f64;
                if scaled < 0.0 { BigUint::one() } else { BigUint::from(10u32).pow(scaled.ceil() as u32) }
            } else {
                BigUint::zero()
            };
            let err = acc.error_ulps() + bound_ulps;
            let value = HighPrecReal::from_parts(acc.mantissa().clone(), work, err).with_digits(digits);
            return Ok(DirectSum { value, cutoff, tail_log10: tail });
        }
        if cutoff >= max_cutoff {
            return Err(LinearFormError::CutoffBudgetExceeded { cutoff });
        }
        cutoff = (cutoff * 2).min(max_cutoff);
    }
}

/// `sum_{k=1}^{cutoff} R''(k)` with no tail estimate.
pub fn direct_sum_with_cutoff(f: &FactoredRationalFunction, digits: u32, cutoff: u64) -> Result<HighPrecReal, LinearFormError> {
    let eval = SecondDerivative::new(f);
    let work = digits + GUARD_DIGITS;
    let mut acc = HighPrecReal::zero(work);
    for k in 1..=cutoff {
        acc = &acc + &HighPrecReal::from_rat(&eval.at(k)?, work);
    }
    Ok(acc.with_digits(digits))
}

/// Exact `R''(k)` from the factored form: every linear factor `(t + c)` becomes
/// `(k + c) + u`, the products are kept to order `u^2`, and `R'' = 2 [u^2] N/Q`.
pub struct SecondDerivative {
    prefactor: (i64, i64),
    numerator: Vec<(i64, u32)>,
    denominator: Vec<(i64, u32)>,
    scalar: BigRat,
}

type Quad = [BigInt; 3];

fn mul_linear(q: &mut Quad, a: &BigInt, b: &BigInt) {
    // (q0 + q1 u + q2 u^2)(a + b u)
    let q2 = &q[2] * a + &q[1] * b;
    let q1 = &q[1] * a + &q[0] * b;
    q[0] *= a;
    q[1] = q1;
    q[2] = q2;
}

impl SecondDerivative {
    pub fn new(f: &FactoredRationalFunction) -> Self {
        Self {
            prefactor: f.prefactor,
            numerator: f.numerator_linear().into_iter().collect(),
            denominator: f.denominator_linear().into_iter().collect(),
            scalar: f.scalar.clone(),
        }
    }

    pub fn at(&self, k: u64) -> Result<BigRat, LinearFormError> {
        let k = k as i64;
        let one = BigInt::one();
        let mut num: Quad = [BigInt::one(), BigInt::zero(), BigInt::zero()];
        let (c0, c1) = self.prefactor;
        mul_linear(&mut num, &BigInt::from(c0 + c1 * k), &BigInt::from(c1));
        for &(c, mult) in &self.numerator {
            let a = BigInt::from(k + c);
            for _ in 0..mult {
                mul_linear(&mut num, &a, &one);
            }
        }
        let mut den: Quad = [BigInt::one(), BigInt::zero(), BigInt::zero()];
        for &(c, mult) in &self.denominator {
            if k + c == 0 {
                return Err(LinearFormError::PoleAtPoint);
            }
            let a = BigInt::from(k + c);
            for _ in 0..mult {
                mul_linear(&mut den, &a, &one);
            }
        }
        if num.iter().all(Zero::is_zero) {
            return Ok(BigRat::zero());
        }
        // [u^2] N/Q = (n2 q0^2 - n1 q1 q0 + n0 (q1^2 - q0 q2)) / q0^3
        let [n0, n1, n2] = num;
        let [q0, q1, q2] = den;
        let top = &n2 * &q0 * &q0 - &n1 * &q1 * &q0 + &n0 * (&q1 * &q1 - &q0 * &q2);
        let bottom = &q0 * &q0 * &q0;
        Ok(BigRat::new(top * 2, bottom) * &self.scalar)
    }
}
