use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::LinearFormError;
use crate::exact::{factorial, BigRat};

/// `(t + shift)_length ^ power`, a rising factorial in `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PochhammerFactor {
    pub shift: i64,
    pub length: u64,
    pub power: u32,
}

impl PochhammerFactor {
    pub fn new(shift: i64, length: u64, power: u32) -> Self {
        Self { shift, length, power }
    }

    pub fn degree(&self) -> u64 {
        self.length * u64::from(self.power)
    }

    /// Constants `c` of the linear factors `(t + c)`.
    pub fn roots_shifts(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.length as i64).map(move |i| self.shift + i)
    }
}

/// `scalar * (c0 + c1 t) * prod numerator / prod denominator`, kept factored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredRationalFunction {
    pub prefactor: (i64, i64),
    pub numerator: Vec<PochhammerFactor>,
    pub denominator: Vec<PochhammerFactor>,
    pub scalar: BigRat,
}

impl FactoredRationalFunction {
    pub fn numerator_degree(&self) -> u64 {
        let pre = u64::from(self.prefactor.1 != 0);
        pre + self.numerator.iter().map(PochhammerFactor::degree).sum::<u64>()
    }

    pub fn denominator_degree(&self) -> u64 {
        self.denominator.iter().map(PochhammerFactor::degree).sum()
    }

    pub fn is_proper(&self) -> bool {
        self.is_zero() || self.numerator_degree() < self.denominator_degree()
    }

    fn is_zero(&self) -> bool {
        self.scalar.is_zero() || (self.prefactor.0 == 0 && self.prefactor.1 == 0)
    }

    /// Numerator linear factors as `(c, multiplicity)` with the factor `(t + c)`.
    pub(crate) fn numerator_linear(&self) -> BTreeMap<i64, u32> {
        collect_linear(&self.numerator)
    }

    pub(crate) fn denominator_linear(&self) -> BTreeMap<i64, u32> {
        collect_linear(&self.denominator)
    }

    /// Exact value at a rational point; `None` at a pole.
    pub fn eval(&self, t: &BigRat) -> Option<BigRat> {
        let mut den = BigRat::one();
        for (c, mult) in self.denominator_linear() {
            let v = t + BigRat::from_integer(BigInt::from(c));
            if v.is_zero() {
                return None;
            }
            den *= pow_rat(&v, mult);
        }
        let mut num = &self.scalar
            * (BigRat::from_integer(BigInt::from(self.prefactor.0))
                + t * BigRat::from_integer(BigInt::from(self.prefactor.1)));
        for (c, mult) in self.numerator_linear() {
            num *= pow_rat(&(t + BigRat::from_integer(BigInt::from(c))), mult);
        }
        Some(num / den)
    }
}

fn collect_linear(factors: &[PochhammerFactor]) -> BTreeMap<i64, u32> {
    let mut out = BTreeMap::new();
    for f in factors {
        for c in f.roots_shifts() {
            *out.entry(c).or_insert(0) += f.power;
        }
    }
    out
}

pub(crate) fn pow_rat(x: &BigRat, e: u32) -> BigRat {
    num_traits::pow(x.clone(), e as usize)
}

/// The integrand of the Zudilin sum, before differentiation:
/// `1/2 prod_j ((13+2j)n)! / (27n)!^6 * (37n + 2t) (t-27n)_{27n}^3 (t+37n+1)_{27n}^3
///  / prod_{j=1}^{10} (t + (12-j)n)_{(13+2j)n+1}`.
pub fn build_zudilin(n: u64) -> Result<FactoredRationalFunction, LinearFormError> {
    if n < 1 {
        return Err(LinearFormError::InvalidIndex(n));
    }
    let ni = n as i64;
    let numerator = vec![
        PochhammerFactor::new(-27 * ni, 27 * n, 3),
        PochhammerFactor::new(37 * ni + 1, 27 * n, 3),
    ];
    let denominator = (1..=10u64)
        .map(|j| PochhammerFactor::new((12 - j as i64) * ni, (13 + 2 * j) * n + 1, 1))
        .collect();
    let mut top = BigInt::one();
    for j in 1..=10u64 {
        top *= factorial((13 + 2 * j) * n);
    }
    let bottom = factorial(27 * n).pow(6) * 2u32;
    Ok(FactoredRationalFunction {
        prefactor: (37 * ni, 2),
        numerator,
        denominator,
        scalar: BigRat::new(top, bottom),
    })
}

/// Poles `t = -m` with their orders, after cancelling numerator zeros.
pub fn pole_spectrum(f: &FactoredRationalFunction) -> Vec<(i64, u32)> {
    let num = f.numerator_linear();
    let mut out = Vec::new();
    for (c, den_mult) in f.denominator_linear() {
        let mut zero_order = num.get(&c).copied().unwrap_or(0);
        // prefactor c0 + c1 t vanishes at t = -c iff c0 = c1 c
        let (c0, c1) = f.prefactor;
        if c1 != 0 && c0 == c1 * c {
            zero_order += 1;
        }
        if den_mult > zero_order {
            out.push((c, den_mult - zero_order));
        }
    }
    out
}

/// Sign `s` with `f(axis - t) = s f(t)` at every sample, if one exists.
pub fn reflection_sign(f: &FactoredRationalFunction, axis: &BigRat, samples: &[BigRat]) -> Option<i8> {
    let mut sign: Option<i8> = None;
    for t in samples {
        let a = f.eval(t)?;
        let b = f.eval(&(axis - t))?;
        let this = if a == b {
            if a.is_zero() {
                continue;
            }
            1
        } else if a == -b {
            -1
        } else {
            return None;
        };
        match sign {
            Some(s) if s != this => return None,
            _ => sign = Some(this),
        }
    }
    sign
}
