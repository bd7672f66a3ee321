//! Exact integer and rational arithmetic: factorials, rising factorials,
//! harmonic power sums and truncated power series with rational coefficients.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational of unbounded size, always stored reduced with a positive
/// denominator.
pub type BigRat = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("series has zero constant term and cannot be inverted")]
    ZeroConstantTerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse rational from {0:?}")]
pub struct ParseRatError(pub String);

pub fn rat_int<T: Into<BigInt>>(v: T) -> BigRat {
    BigRat::from_integer(v.into())
}

pub fn rat<T: Into<BigInt>, U: Into<BigInt>>(num: T, den: U) -> BigRat {
    BigRat::new(num.into(), den.into())
}

/// `m!` by a balanced product tree.
pub fn factorial(m: u64) -> BigInt {
    if m < 2 {
        return BigInt::one();
    }
    range_product(1, m)
}

// Product of lo..=hi, split in halves so the multiplications stay balanced.
fn range_product(lo: u64, hi: u64) -> BigInt {
    if hi < lo {
        return BigInt::one();
    }
    if hi - lo < 16 {
        let mut acc = BigInt::one();
        for k in lo..=hi {
            acc *= k;
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    range_product(lo, mid) * range_product(mid + 1, hi)
}

/// Rising factorial `a (a+1) ... (a+p-1)`; `p = 0` gives 1.
pub fn pochhammer(a: &BigRat, p: u64) -> BigRat {
    let mut acc = BigRat::one();
    let mut x = a.clone();
    let one = BigRat::one();
    for _ in 0..p {
        if x.is_zero() {
            return BigRat::zero();
        }
        acc *= &x;
        x += &one;
    }
    acc
}

/// `H_m^{(s)} = sum_{l=1}^{m} l^{-s}`, exact.
pub fn harmonic_power_sum(m: u64, s: u32) -> BigRat {
    // Accumulate over the common denominator lcm(1..m)^s to avoid one gcd per step.
    if m == 0 {
        return BigRat::zero();
    }
    let mut l = BigInt::one();
    for k in 1..=m {
        l = l.lcm(&BigInt::from(k));
    }
    let den = l.pow(s);
    let mut num = BigInt::zero();
    for k in 1..=m {
        num += &den / BigInt::from(k).pow(s);
    }
    BigRat::new(num, den)
}

/// All `H_m^{(s)}` for `m = 0..=max_m`, built incrementally.
pub fn harmonic_power_sums_upto(max_m: u64, s: u32) -> Vec<BigRat> {
    let mut out = Vec::with_capacity(max_m as usize + 1);
    let mut acc = BigRat::zero();
    out.push(acc.clone());
    for k in 1..=max_m {
        acc += BigRat::new(BigInt::one(), BigInt::from(k).pow(s));
        out.push(acc.clone());
    }
    out
}

/// Approximate `log2 |x|` for a nonzero rational; `-inf` for zero.
pub fn log2_abs(x: &BigRat) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    log2_big(x.numer()) - log2_big(x.denom())
}

pub fn log2_big(x: &BigInt) -> f64 {
    log2_biguint(x.magnitude())
}

pub(crate) fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return x.to_f64().unwrap_or(f64::NAN).log2();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    top.to_f64().unwrap_or(f64::NAN).log2() + shift as f64
}

/// Decimal string `p` or `p/q`.
pub fn rat_to_string(x: &BigRat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `p/q`, or a finite decimal such as `-0.35` or `1e-3` exactly.
pub fn parse_rat(s: &str) -> Result<BigRat, ParseRatError> {
    let err = || ParseRatError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let num = parse_decimal(n.trim()).ok_or_else(err)?;
        let den = parse_decimal(d.trim()).ok_or_else(err)?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(num / den);
    }
    parse_decimal(t).ok_or_else(err)
}

fn parse_decimal(t: &str) -> Option<BigRat> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if neg {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    Some(if scale >= 0 {
        BigRat::from_integer(num * ten.pow(scale as u32))
    } else {
        BigRat::new(num, ten.pow((-scale) as u32))
    })
}

/// Power series in `u` truncated after `u^K`, with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRat>,
}

impl TruncatedSeries {
    /// Builds a series of order `order`, padding or truncating `coeffs`.
    pub fn new(mut coeffs: Vec<BigRat>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRat::zero());
        Self { coeffs }
    }

    pub fn constant(c: BigRat, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(BigRat::one(), order)
    }

    /// The series `a + b u`.
    pub fn linear(a: BigRat, b: BigRat, order: usize) -> Self {
        Self::new(vec![a, b], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &BigRat {
        &self.coeffs[k]
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch(self.order(), other.order()));
        }
        let k = self.order();
        let mut out = vec![BigRat::zero(); k + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=k - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Ok(Self { coeffs: out })
    }

    /// In-place multiplication by `a + b u`, the hot path of local expansions.
    pub fn mul_linear_assign(&mut self, a: &BigInt, b: &BigInt) {
        for k in (0..self.coeffs.len()).rev() {
            let mut c = &self.coeffs[k] * a;
            if k > 0 && !b.is_zero() {
                c += &self.coeffs[k - 1] * b;
            }
            self.coeffs[k] = c;
        }
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let k = self.order();
        let inv0 = c0.recip();
        let mut out: Vec<BigRat> = Vec::with_capacity(k + 1);
        out.push(inv0.clone());
        for m in 1..=k {
            let mut acc = BigRat::zero();
            for i in 1..=m {
                let a = &self.coeffs[i];
                if !a.is_zero() {
                    acc += a * &out[m - i];
                }
            }
            out.push(-(acc * &inv0));
        }
        Ok(Self { coeffs: out })
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", rat_to_string(c))?,
                1 => write!(f, "({})u", rat_to_string(c))?,
                _ => write!(f, "({})u^{k}", rat_to_string(c))?,
            }
        }
        write!(f, " + O(u^{})", self.order() + 1)
    }
}

/// Least common multiple of the denominators of `values`.
pub fn lcm_denominators<'a, I: IntoIterator<Item = &'a BigRat>>(values: I) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn naive_factorial(m: u64) -> BigInt {
        let mut acc = BigInt::one();
        let mut k = 1u64;
        while k <= m {
            acc *= k;
            k += 1;
        }
        acc
    }

    #[test]
    fn factorial_small_values() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(1), BigInt::one());
        assert_eq!(factorial(5), BigInt::from(120));
    }

    #[test]
    fn factorial_33_matches_naive_loop() {
        let expected = BigInt::from_str("8683317618811886495518194401280000000").unwrap();
        assert_eq!(naive_factorial(33), expected);
        assert_eq!(factorial(33), expected);
        for m in [17, 64, 100, 257] {
            assert_eq!(factorial(m), naive_factorial(m));
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&rat(7, 2), 0), BigRat::one());
        assert_eq!(pochhammer(&rat_int(2), 3), rat_int(24));
        assert_eq!(pochhammer(&rat_int(-3), 5), BigRat::zero());
        assert_eq!(pochhammer(&rat(1, 2), 2), rat(3, 4));
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic_power_sum(0, 5), BigRat::zero());
        assert_eq!(harmonic_power_sum(3, 2), rat(49, 36));
    }

    #[test]
    fn harmonic_54_12_matches_reverse_summation() {
        let forward = harmonic_power_sum(54, 12);
        let mut reverse = BigRat::zero();
        for l in (1..=54u64).rev() {
            reverse += BigRat::new(BigInt::one(), BigInt::from(l).pow(12));
        }
        assert_eq!(forward, reverse);
        assert_eq!(harmonic_power_sums_upto(54, 12)[54], forward);
    }

    #[test]
    fn series_mul_examples() {
        let a = TruncatedSeries::linear(rat_int(1), rat_int(1), 2);
        let b = TruncatedSeries::linear(rat_int(1), rat_int(-1), 2);
        assert_eq!(
            a.mul(&b).unwrap().coeffs(),
            &[rat_int(1), rat_int(0), rat_int(-1)]
        );
        let one = TruncatedSeries::one(2);
        assert_eq!(a.mul(&one).unwrap(), a);
        let c = TruncatedSeries::new(vec![rat_int(1), rat_int(1), rat_int(1)], 2);
        assert_eq!(
            c.mul(&c).unwrap().coeffs(),
            &[rat_int(1), rat_int(2), rat_int(3)]
        );
        let d = TruncatedSeries::one(3);
        assert_eq!(a.mul(&d), Err(SeriesError::OrderMismatch(2, 3)));
    }

    #[test]
    fn series_inverse_examples() {
        let a = TruncatedSeries::linear(rat_int(1), rat_int(-1), 2);
        assert_eq!(a.inverse().unwrap().coeffs(), &[rat_int(1), rat_int(1), rat_int(1)]);
        let c = TruncatedSeries::constant(rat(3, 7), 4);
        assert_eq!(c.inverse().unwrap(), TruncatedSeries::constant(rat(7, 3), 4));
        let z = TruncatedSeries::linear(rat_int(0), rat_int(1), 2);
        assert_eq!(z.inverse(), Err(SeriesError::ZeroConstantTerm));
    }

    #[test]
    fn mul_linear_matches_general_mul() {
        let mut s = TruncatedSeries::new(vec![rat(1, 2), rat(-3, 5), rat_int(7)], 3);
        let lin = TruncatedSeries::linear(rat_int(4), rat_int(-2), 3);
        let expected = s.mul(&lin).unwrap();
        s.mul_linear_assign(&BigInt::from(4), &BigInt::from(-2));
        assert_eq!(s, expected);
    }

    #[test]
    fn parse_rat_forms() {
        assert_eq!(parse_rat("0.35").unwrap(), rat(7, 20));
        assert_eq!(parse_rat("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rat("42").unwrap(), rat_int(42));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
        assert!(parse_rat("").is_err());
    }

    #[test]
    fn log2_of_powers_of_two() {
        assert!((log2_abs(&rat_int(BigInt::one() << 300u32)) - 300.0).abs() < 1e-9);
        assert!((log2_abs(&rat(1, 1024)) + 10.0).abs() < 1e-12);
    }

    fn arb_rat() -> impl Strategy<Value = BigRat> {
        (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn rational_arithmetic_is_exact(a in arb_rat(), b in arb_rat()) {
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a * &b) / &b, a.clone());
            }
            prop_assert!(a.denom().is_positive());
        }

        #[test]
        fn pochhammer_splits(n in -20i64..20, d in 1i64..6, p in 0u64..12, q in 0u64..12) {
            let a = rat(n, d);
            let lhs = pochhammer(&a, p + q);
            let rhs = pochhammer(&a, p) * pochhammer(&(&a + rat_int(p)), q);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn inverse_round_trips(coeffs in proptest::collection::vec((-50i64..50, 1i64..20), 1..8)) {
            let order = coeffs.len() - 1;
            let mut cs: Vec<BigRat> = coeffs.iter().map(|&(n, d)| rat(n, d)).collect();
            if cs[0].is_zero() {
                cs[0] = rat_int(1);
            }
            let s = TruncatedSeries::new(cs, order);
            let prod = s.mul(&s.inverse().unwrap()).unwrap();
            prop_assert_eq!(prod, TruncatedSeries::one(order));
        }
    }
}
