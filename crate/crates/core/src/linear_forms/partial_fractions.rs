use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::rational_function::{pole_spectrum, pow_rat, FactoredRationalFunction};
use super::LinearFormError;
use crate::exact::{BigRat, TruncatedSeries};

/// `sum_{(m, j)} a_{j,m} / (t + m)^j`, keyed by `(m, j)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialFractionExpansion {
    pub terms: BTreeMap<(i64, u32), BigRat>,
}

impl PartialFractionExpansion {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_order(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn min_order(&self) -> u32 {
        self.terms.keys().map(|k| k.1).min().unwrap_or(0)
    }

    pub fn get(&self, m: i64, j: u32) -> Option<&BigRat> {
        self.terms.get(&(m, j))
    }

    /// Exact value at a rational point; `None` at a pole.
    pub fn eval(&self, t: &BigRat) -> Option<BigRat> {
        let mut acc = BigRat::zero();
        for (&(m, j), a) in &self.terms {
            let v = t + BigRat::from_integer(BigInt::from(m));
            if v.is_zero() {
                return None;
            }
            acc += a / pow_rat(&v, j);
        }
        Some(acc)
    }

    pub fn scaled(&self, c: &BigRat) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }
}

/// Decomposes a proper factored rational function pole by pole.
///
/// Around `t = -m` write `u = t + m`; every linear factor `(t + c)` becomes
/// `(c - m) + u`. With `mu` the pole order, `f = u^-mu * N(u) / Q(u)` where
/// `N` collects the nonvanishing numerator factors and `Q` the nonvanishing
/// denominator factors, so the coefficient of `u^k` in `N/Q` (order `mu - 1`)
/// is `a_{mu-k, m}`.
pub fn partial_fractions(f: &FactoredRationalFunction) -> Result<PartialFractionExpansion, LinearFormError> {
    if !f.is_proper() {
        return Err(LinearFormError::NotProper {
            numerator_degree: f.numerator_degree(),
            denominator_degree: f.denominator_degree(),
        });
    }
    if f.scalar.is_zero() || f.prefactor == (0, 0) {
        return Ok(PartialFractionExpansion::default());
    }
    let num = f.numerator_linear();
    let den = f.denominator_linear();
    let poles = pole_spectrum(f);
    let local: Vec<Vec<((i64, u32), BigRat)>> = poles
        .par_iter()
        .map(|&(m, order)| {
            let k = order as usize - 1;
            let mut n_ser = TruncatedSeries::one(k);
            let (c0, c1) = f.prefactor;
            let pre_const = c0 - c1 * m;
            if pre_const == 0 {
                n_ser.mul_linear_assign(&BigInt::from(c1), &BigInt::zero());
            } else {
                n_ser.mul_linear_assign(&BigInt::from(pre_const), &BigInt::from(c1));
            }
            let one = BigInt::one();
            for (&c, &mult) in &num {
                if c != m {
                    let a = BigInt::from(c - m);
                    for _ in 0..mult {
                        n_ser.mul_linear_assign(&a, &one);
                    }
                }
            }
            let mut q_ser = TruncatedSeries::one(k);
            for (&c, &mult) in &den {
                if c != m {
                    let a = BigInt::from(c - m);
                    for _ in 0..mult {
                        q_ser.mul_linear_assign(&a, &one);
                    }
                }
            }
            let ratio = n_ser
                .mul(&q_ser.inverse().expect("nonvanishing factors"))
                .expect("equal orders");
            ratio
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .map(|(i, a)| ((m, order - i as u32), a * &f.scalar))
                .collect()
        })
        .collect();
    Ok(PartialFractionExpansion {
        terms: local.into_iter().flatten().collect(),
    })
}

/// `d^2/dt^2`: `a (t+m)^-j` becomes `j (j+1) a (t+m)^-(j+2)`.
pub fn second_derivative(p: &PartialFractionExpansion) -> PartialFractionExpansion {
    PartialFractionExpansion {
        terms: p
            .terms
            .iter()
            .map(|(&(m, j), a)| ((m, j + 2), a * BigInt::from(u64::from(j) * u64::from(j + 1))))
            .collect(),
    }
}

/// Checks `p` against `f` at the given points, exactly.
pub fn reconstructs(f: &FactoredRationalFunction, p: &PartialFractionExpansion, samples: &[BigRat]) -> bool {
    samples.iter().all(|t| match (f.eval(t), p.eval(t)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    })
}

/// `count` rational sample points off the integer lattice, spread over `[-30, 1000]`.
pub fn sample_points(count: usize) -> Vec<BigRat> {
    (0..count as i64)
        .map(|i| BigRat::new(BigInt::from(1009 * i + 1), BigInt::from(1013)) - BigRat::from_integer(BigInt::from(30)))
        .collect()
}
