use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::hypothesis::{rational_approximation, tol_from_log10, DEFAULT_D_MAX, DEFAULT_RATIONAL_TOL_LOG10};
use super::OscillationError;
use crate::exact::{rat_to_string, BigRat};
use crate::highprec::{div_round, pow10, HighPrecReal};

pub const MIN_DENSITY_DIGITS: u32 = 40;
const SHARD: u64 = 1 << 16;

/// `(n theta_1, ..., n theta_s) mod 1` in fixed point at a common scale,
/// advanced by addition only.
#[derive(Debug, Clone)]
pub(crate) struct FixedOrbit {
    modulus: BigInt,
    steps: Vec<BigInt>,
    pos: Vec<BigInt>,
}

impl FixedOrbit {
    /// Orbit positioned at `n = start`; the start point is an exact product.
    pub fn new(theta: &[HighPrecReal], digits: u32, start: u64) -> Self {
        let probe = HighPrecReal::zero(digits);
        let modulus = pow10(probe.scale());
        let steps: Vec<BigInt> = theta
            .iter()
            .map(|t| t.with_digits(digits).mantissa().mod_floor(&modulus))
            .collect();
        let pos = steps.iter().map(|s| (s * BigInt::from(start)).mod_floor(&modulus)).collect();
        Self { modulus, steps, pos }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn positions(&self) -> &[BigInt] {
        &self.pos
    }

    pub fn advance(&mut self) {
        for (p, s) in self.pos.iter_mut().zip(&self.steps) {
            *p += s;
            if *p >= self.modulus {
                *p -= &self.modulus;
            }
        }
    }
}

/// Closed arc `[lo, lo + width]` on `R/Z` in the orbit's fixed point, with
/// points closer than `band` to either end counted as outside.
#[derive(Debug, Clone)]
pub(crate) struct Arc {
    lo: BigInt,
    width: BigInt,
    band: BigInt,
}

impl Arc {
    pub fn new(lo: &BigRat, width: &BigRat, modulus: &BigInt, band: BigInt) -> Self {
        let m = BigRat::from_integer(modulus.clone());
        let lo_m = lo * &m;
        let lo = div_round(lo_m.numer(), lo_m.denom()).mod_floor(modulus);
        let w = width * &m;
        Self { lo, width: div_round(w.numer(), w.denom()), band }
    }

    pub fn from_fixed(lo: BigInt, width: BigInt, band: BigInt) -> Self {
        Self { lo, width, band }
    }

    pub fn contains(&self, x: &BigInt, modulus: &BigInt) -> bool {
        let rel = (x - &self.lo).mod_floor(modulus);
        rel >= self.band && rel <= &self.width - &self.band
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub k_max: u64,
    pub hits: u64,
    pub empirical: f64,
    /// `prod min(y_i - x_i, 1)`; absent when the orbit is not equidistributed.
    pub predicted: Option<f64>,
    pub non_equidistributed: bool,
    pub bounds: Vec<(String, String)>,
}

/// Counts `n <= k_max` with `frac(n theta_i)` in `[x_i, y_i]` (read mod 1) for all `i`.
pub fn kw_density(theta: &[HighPrecReal], bounds: &[(BigRat, BigRat)], k_max: u64) -> Result<DensityReport, OscillationError> {
    if theta.is_empty() || theta.len() != bounds.len() {
        return Err(OscillationError::MalformedBox(format!(
            "{} generators but {} intervals",
            theta.len(),
            bounds.len()
        )));
    }
    if k_max < 1 {
        return Err(OscillationError::MalformedBox("k_max must be at least 1".into()));
    }
    let digits = theta.iter().map(HighPrecReal::digits).min().unwrap_or(0);
    if digits < MIN_DENSITY_DIGITS {
        return Err(OscillationError::PrecisionTooLow { have: digits, min: MIN_DENSITY_DIGITS });
    }
    let one = BigRat::from_integer(1.into());
    for (x, y) in bounds {
        if y < x || y - x > one {
            return Err(OscillationError::MalformedBox(format!("[{}, {}]", rat_to_string(x), rat_to_string(y))));
        }
    }
    let tol = tol_from_log10(DEFAULT_RATIONAL_TOL_LOG10);
    let non_equi = theta.iter().any(|t| rational_approximation(t, DEFAULT_D_MAX, &tol).is_some());

    let modulus = FixedOrbit::new(theta, digits, 0).modulus().clone();
    let arcs: Vec<Arc> = bounds
        .iter()
        .map(|(x, y)| Arc::new(x, &(y - x), &modulus, BigInt::zero()))
        .collect();
    let shards: Vec<(u64, u64)> = (0..k_max.div_ceil(SHARD))
        .map(|i| (i * SHARD + 1, ((i + 1) * SHARD).min(k_max)))
        .collect();
    let hits: u64 = shards
        .par_iter()
        .map(|&(lo, hi)| {
            let mut orbit = FixedOrbit::new(theta, digits, lo);
            let mut count = 0u64;
            for n in lo..=hi {
                if orbit.positions().iter().zip(&arcs).all(|(x, a)| a.contains(x, &modulus)) {
                    count += 1;
                }
                if n < hi {
                    orbit.advance();
                }
            }
            count
        })
        .sum();
    let predicted = (!non_equi).then(|| {
        bounds
            .iter()
            .map(|(x, y)| (y - x).to_f64_lossy().min(1.0))
            .product()
    });
    Ok(DensityReport {
        k_max,
        hits,
        empirical: hits as f64 / k_max as f64,
        predicted,
        non_equidistributed: non_equi,
        bounds: bounds.iter().map(|(x, y)| (rat_to_string(x), rat_to_string(y))).collect(),
    })
}

trait LossyF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl LossyF64 for BigRat {
    fn to_f64_lossy(&self) -> f64 {
        HighPrecReal::from_rat(self, 20).to_f64()
    }
}

pub(crate) fn frac_of(x: &HighPrecReal) -> HighPrecReal {
    let f = x.frac();
    if f.is_negative() {
        &f + &HighPrecReal::from_int(1, f.digits())
    } else {
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_rat, rat, rat_int};
    use crate::highprec::sqrt_int;

    fn b(x: &str, y: &str) -> (BigRat, BigRat) {
        (parse_rat(x).unwrap(), parse_rat(y).unwrap())
    }

    // direct count with f64 products as an independent oracle
    fn naive(theta: f64, lo: f64, hi: f64, k: u64) -> u64 {
        (1..=k)
            .filter(|&n| {
                let f = (n as f64 * theta).fract();
                f >= lo && f <= hi
            })
            .count() as u64
    }

    #[test]
    fn sqrt2_counter_matches_naive_count() {
        let t = sqrt_int(2, 60);
        let r = kw_density(&[t], &[b("0.1", "0.35")], 200_000).unwrap();
        assert_eq!(r.hits, naive(std::f64::consts::SQRT_2, 0.1, 0.35, 200_000));
        assert!(!r.non_equidistributed);
    }

    #[test]
    fn sqrt2_density_near_quarter() {
        let r = kw_density(&[sqrt_int(2, 60)], &[b("0.1", "0.35")], 1_000_000).unwrap();
        assert!((r.empirical - 0.25).abs() <= 0.01, "{}", r.empirical);
        assert!((r.predicted.unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn rational_theta_is_flagged() {
        let r = kw_density(&[HighPrecReal::from_rat(&rat(1, 2), 60)], &[b("0.1", "0.35")], 1000).unwrap();
        assert_eq!(r.hits, 0);
        assert!(r.non_equidistributed && r.predicted.is_none());
    }

    #[test]
    fn full_and_empty_boxes() {
        let t = sqrt_int(3, 50);
        assert_eq!(kw_density(&[t.clone()], &[b("0", "1")], 5000).unwrap().empirical, 1.0);
        assert_eq!(kw_density(&[t], &[b("0.2", "0.2")], 5000).unwrap().empirical, 0.0);
    }

    #[test]
    fn wrapped_interval() {
        let t = sqrt_int(2, 60);
        let direct = kw_density(&[t.clone()], &[(rat(-1, 4), rat(1, 4))], 50_000).unwrap();
        let a = kw_density(&[t.clone()], &[(rat_int(0), rat(1, 4))], 50_000).unwrap();
        let c = kw_density(&[t], &[(rat(3, 4), rat_int(1))], 50_000).unwrap();
        assert_eq!(direct.hits, a.hits + c.hits);
    }

    #[test]
    fn malformed_boxes() {
        let t = sqrt_int(2, 60);
        assert!(kw_density(&[t.clone()], &[b("0.5", "0.1")], 10).is_err());
        assert!(kw_density(&[t.clone()], &[b("0", "1.5")], 10).is_err());
        assert!(kw_density(&[t.with_digits(20)], &[b("0", "0.5")], 10).is_err());
        assert!(kw_density(&[t], &[], 10).is_err());
    }

    #[test]
    fn sharding_is_deterministic() {
        let t = [sqrt_int(2, 60), sqrt_int(5, 60)];
        let bx = [b("0.1", "0.6"), b("0.3", "0.9")];
        let r1 = kw_density(&t, &bx, 3 * SHARD + 17).unwrap();
        let mut orbit = FixedOrbit::new(&t, 60, 1);
        let m = orbit.modulus().clone();
        let arcs: Vec<Arc> = bx.iter().map(|(x, y)| Arc::new(x, &(y - x), &m, BigInt::zero())).collect();
        let mut hits = 0;
        for _ in 0..3 * SHARD + 17 {
            if orbit.positions().iter().zip(&arcs).all(|(x, a)| a.contains(x, &m)) {
                hits += 1;
            }
            orbit.advance();
        }
        assert_eq!(r1.hits, hits);
    }
}
