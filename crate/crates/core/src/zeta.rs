//! Riemann zeta values at integers `s >= 2` to hundreds of digits.
//!
//! Two unrelated methods are implemented so a [`ZetaTable`] can check itself:
//! Euler–Maclaurin summation with exact Bernoulli corrections, and Borwein's
//! accelerated alternating series for the eta function.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exact::{factorial, BigRat};
use crate::highprec::{pow10, HighPrecReal, GUARD_DIGITS};

pub const MIN_ZETA_DIGITS: u32 = 10;
/// Largest Euler–Maclaurin cutoff tried before giving up.
pub const MAX_EM_CUTOFF: u64 = 1 << 17;

// Working digits added on top of the requested precision.
const EXTRA: u32 = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZetaError {
    #[error("zeta({s}) needs s >= 2 and at least {MIN_ZETA_DIGITS} digits (got {digits})")]
    InvalidArgument { s: u32, digits: u32 },
    #[error("cannot reach {digits} digits for zeta({s}) within the configured cutoff")]
    BudgetUnreachable { s: u32, digits: u32 },
    #[error("zeta({s}): methods disagree by 10^{diff_log10:.1}")]
    VerificationFailed { s: u32, diff_log10: f64 },
    #[error("zeta({0}) is not in the table")]
    Missing(u32),
}

/// `B_{2m}` for `m = 0, 1, 2, ...`, from
/// `sum_{k=0}^{n} C(n+1, k) B_k = 0` restricted to even indices.
pub fn bernoulli_even(m: usize) -> BigRat {
    static CACHE: OnceLock<Mutex<Vec<BigRat>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![BigRat::one()]));
    let mut table = cache.lock().unwrap_or_else(|e| e.into_inner());
    while table.len() <= m {
        let mm = table.len();
        let n = 2 * mm as u64 + 1;
        // B_0 + n B_1 with B_1 = -1/2
        let mut acc = BigRat::one() - BigRat::new(BigInt::from(n), BigInt::from(2));
        let mut binom = BigInt::one();
        for j in 1..(2 * mm as u64) {
            binom = binom * (n - j + 1) / j;
            if j % 2 == 0 {
                acc += &table[(j / 2) as usize] * &binom;
            }
        }
        table.push(-acc / BigInt::from(n));
    }
    table[m].clone()
}

/// `B_n` with the convention `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> BigRat {
    match n {
        1 => BigRat::new(BigInt::from(-1), BigInt::from(2)),
        _ if n % 2 == 1 => BigRat::zero(),
        _ => bernoulli_even(n / 2),
    }
}

fn check_args(s: u32, digits: u32) -> Result<(), ZetaError> {
    if s < 2 || digits < MIN_ZETA_DIGITS {
        return Err(ZetaError::InvalidArgument { s, digits });
    }
    Ok(())
}

/// `zeta(s)` with absolute error below `10^-digits` (Euler–Maclaurin).
pub fn zeta_high_precision(s: u32, digits: u32) -> Result<HighPrecReal, ZetaError> {
    zeta_euler_maclaurin(s, digits)
}

/// Euler–Maclaurin: `sum_{k<N} k^-s + N^{1-s}/(s-1) + N^-s/2 + sum_j B_{2j}/(2j)! (s)_{2j-1} N^{-s-2j+1}`.
///
/// For real `s` the remainder after the last included correction is bounded
/// by the first omitted one, so corrections are added until one drops below
/// a hundredth of a unit in the last place. The cutoff `N` starts near the
/// digit count and doubles whenever the corrections stop decreasing first.
pub fn zeta_euler_maclaurin(s: u32, digits: u32) -> Result<HighPrecReal, ZetaError> {
    check_args(s, digits)?;
    let work = digits + EXTRA;
    let mut cutoff = u64::from(work).max(2 * u64::from(s)).max(16);
    while cutoff <= MAX_EM_CUTOFF {
        if let Some(v) = euler_maclaurin_at(s, work, cutoff) {
            return Ok(v.with_digits(digits));
        }
        cutoff *= 2;
    }
    Err(ZetaError::BudgetUnreachable { s, digits })
}

fn euler_maclaurin_at(s: u32, work: u32, cutoff: u64) -> Option<HighPrecReal> {
    let big_n = BigInt::from(cutoff);
    let mut acc = HighPrecReal::zero(work);
    for k in 1..cutoff {
        let term = BigRat::new(BigInt::one(), BigInt::from(k).pow(s));
        acc = &acc + &HighPrecReal::from_rat(&term, work);
    }
    let n_pow_s = big_n.pow(s);
    let integral = BigRat::new(big_n.clone(), &n_pow_s * (s - 1));
    let boundary = BigRat::new(BigInt::one(), &n_pow_s * 2);
    acc = &acc + &HighPrecReal::from_rat(&integral, work);
    acc = &acc + &HighPrecReal::from_rat(&boundary, work);

    // |term| * 10^scale < 1/100 ends the loop.
    let threshold = BigRat::new(BigInt::one(), pow10(work + GUARD_DIGITS) * 100);
    let n2 = &big_n * &big_n;
    let mut n_power = &n_pow_s * &big_n; // N^{s+2j-1} at j = 1
    let mut rising = BigInt::from(s); // (s)_{2j-1} at j = 1
    let mut prev: Option<BigRat> = None;
    for j in 1usize.. {
        let coeff = bernoulli_even(j) * &rising / factorial(2 * j as u64);
        let term = coeff / &n_power;
        let mag = term.abs();
        if mag < threshold {
            // remainder bounded by this omitted term
            return Some(HighPrecReal::from_parts(
                acc.mantissa().clone(),
                work,
                acc.error_ulps() + 1u32,
            ));
        }
        if prev.as_ref().is_some_and(|p| &mag >= p) {
            return None;
        }
        acc = &acc + &HighPrecReal::from_rat(&term, work);
        prev = Some(mag);
        let a = u64::from(s) + 2 * j as u64 - 1;
        rising *= a * (a + 1);
        n_power *= &n2;
    }
    unreachable!()
}

/// Borwein's algorithm for `eta(s) = sum (-1)^{k-1} k^-s`, then
/// `zeta(s) = eta(s) / (1 - 2^{1-s})`. Truncation error `<= 3 / (3 + sqrt 8)^n`.
pub fn zeta_eta_series(s: u32, digits: u32) -> Result<HighPrecReal, ZetaError> {
    check_args(s, digits)?;
    let work = digits + EXTRA;
    // ln(3 + sqrt 8) = 1.7627...
    let n = ((f64::from(work + GUARD_DIGITS) + 2.0) * std::f64::consts::LN_10 / 1.762_747).ceil() as u64 + 1;
    let d = borwein_weights(n);
    let dn = &d[n as usize];
    let mut acc = HighPrecReal::zero(work);
    for k in 0..n {
        let diff = &d[k as usize] - dn;
        if diff.is_zero() {
            continue;
        }
        let mut term = BigRat::new(diff, BigInt::from(k + 1).pow(s) * dn);
        if k % 2 == 1 {
            term = -term;
        }
        acc = &acc + &HighPrecReal::from_rat(&term, work);
    }
    let eta = -&acc;
    let eta = HighPrecReal::from_parts(eta.mantissa().clone(), work, eta.error_ulps() + 1u32);
    let two_pow = BigInt::one() << (s - 1);
    let factor = BigRat::new(two_pow.clone(), two_pow - 1);
    Ok(eta.mul_rat(&factor).with_digits(digits))
}

// d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
fn borwein_weights(n: u64) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut t = BigInt::one();
    let mut partial = t.clone();
    out.push(partial.clone());
    for i in 1..=n {
        t = t * 4u32 * (n + i - 1) * (n - i + 1) / ((2 * i) * (2 * i - 1));
        partial += &t;
        out.push(partial.clone());
    }
    out
}

/// Zeta values at a fixed precision, each confirmed by both methods to
/// within `10^(-digits+5)`.
#[derive(Debug, Clone)]
pub struct ZetaTable {
    digits: u32,
    values: BTreeMap<u32, HighPrecReal>,
}

impl ZetaTable {
    pub fn build<I: IntoIterator<Item = u32>>(s_values: I, digits: u32) -> Result<Self, ZetaError> {
        let wanted: Vec<u32> = s_values.into_iter().collect();
        let tolerance = HighPrecReal::from_rat(&BigRat::new(BigInt::one(), pow10(digits.saturating_sub(5))), digits);
        let computed: Result<Vec<(u32, HighPrecReal)>, ZetaError> = wanted
            .par_iter()
            .map(|&s| {
                let (em, eta) = rayon::join(|| zeta_euler_maclaurin(s, digits), || zeta_eta_series(s, digits));
                let (em, eta) = (em?, eta?);
                let diff = (&em - &eta).abs();
                if diff > tolerance {
                    return Err(ZetaError::VerificationFailed { s, diff_log10: diff.log10_abs() });
                }
                Ok((s, em))
            })
            .collect();
        Ok(Self { digits, values: computed?.into_iter().collect() })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn get(&self, s: u32) -> Result<&HighPrecReal, ZetaError> {
        self.values.get(&s).ok_or(ZetaError::Missing(s))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &HighPrecReal)> {
        self.values.iter().map(|(s, v)| (*s, v))
    }
}
