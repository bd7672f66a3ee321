use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::angle::{Angle, AnglePair};
use super::OscillationError;
use crate::exact::{rat, BigRat};
use crate::highprec::{pow10, HighPrecReal};

pub const DEFAULT_D_MAX: u64 = 1_000_000;
/// `log10` of the default residual tolerance in [`detect_pi_rational`].
pub const DEFAULT_RATIONAL_TOL_LOG10: i32 = -30;
/// `log10` of the tolerance for deciding congruences mod `pi`.
pub const CONGRUENCE_TOL_LOG10: i32 = -40;

/// `omega / pi = c / d` up to `residual`.
#[derive(Debug, Clone, Serialize)]
pub struct PiRationalWitness {
    #[serde(serialize_with = "ser_bigint")]
    pub c: BigInt,
    pub d: u64,
    pub residual: HighPrecReal,
}

fn ser_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl PiRationalWitness {
    pub fn ratio(&self) -> BigRat {
        BigRat::new(self.c.clone(), BigInt::from(self.d))
    }
}

pub(crate) fn tol_from_log10(e: i32) -> BigRat {
    if e >= 0 {
        BigRat::from_integer(pow10(e as u32))
    } else {
        BigRat::new(BigInt::one(), pow10((-e) as u32))
    }
}

/// Best rational approximation `p/q` of `x` (q <= d_max) from its continued
/// fraction, returning the first convergent within `tol`.
pub fn rational_approximation(x: &HighPrecReal, d_max: u64, tol: &BigRat) -> Option<(BigInt, u64, HighPrecReal)> {
    let target = x.to_rat();
    let digits = x.digits();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = target.clone();
    loop {
        let a = rest.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > BigInt::from(d_max) {
            return None;
        }
        let q: u64 = (&k2).try_into().ok()?;
        let residual = (x - &HighPrecReal::from_rat(&BigRat::new(h2.clone(), k2.clone()), digits)).abs();
        if residual.to_rat() < *tol {
            return Some((h2, q, residual));
        }
        let frac = &rest - BigRat::from_integer(a);
        if frac.is_zero() {
            return None;
        }
        rest = frac.recip();
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
}

/// Continued-fraction test for `omega / pi` rational with denominator at most `d_max`.
pub fn detect_pi_rational(omega: &Angle, d_max: u64, tol: &BigRat) -> Option<PiRationalWitness> {
    if let Some(e) = &omega.exact {
        // r pi + q with q != 0 is never a rational multiple of pi
        if !e.rational.is_zero() {
            return None;
        }
        let d = e.pi_coeff.denom();
        return d.try_into().ok().filter(|&d: &u64| d <= d_max).map(|d| PiRationalWitness {
            c: e.pi_coeff.numer().clone(),
            d,
            residual: HighPrecReal::zero(omega.digits()),
        });
    }
    rational_approximation(&omega.over_pi, d_max, tol).map(|(c, d, residual)| PiRationalWitness { c, d, residual })
}

pub fn detect_pi_rational_default(omega: &Angle) -> Option<PiRationalWitness> {
    detect_pi_rational(omega, DEFAULT_D_MAX, &tol_from_log10(DEFAULT_RATIONAL_TOL_LOG10))
}

/// Decides `angle ≡ target * pi (mod pi)`, exactly for `pi`-linear input and
/// to [`CONGRUENCE_TOL_LOG10`] otherwise.
pub fn congruent_mod_pi(angle: &Angle, target: &BigRat) -> Result<bool, OscillationError> {
    if let Some(e) = &angle.exact {
        return Ok(e.rational.is_zero() && (&e.pi_coeff - target).is_integer());
    }
    let digits = angle.digits();
    let shifted = &angle.over_pi - &HighPrecReal::from_rat(target, digits);
    let dist = shifted.dist_to_int();
    let tol = tol_from_log10(CONGRUENCE_TOL_LOG10);
    let v = dist.to_rat();
    let err = dist.error_bound();
    if &v + &err < tol {
        Ok(true)
    } else if &v - &err > tol {
        Ok(false)
    } else {
        Err(OscillationError::Undecidable(format!("{angle} against {target}*pi")))
    }
}

fn half() -> BigRat {
    rat(1, 2)
}

/// Hypothesis for one pair: not (`omega ≡ 0` and `phi ≡ pi/2`) mod `pi`.
pub fn hypothesis_single(p: &AnglePair) -> Result<bool, OscillationError> {
    let w0 = congruent_mod_pi(&p.omega, &BigRat::zero())?;
    let ph = congruent_mod_pi(&p.phi, &half())?;
    Ok(!(w0 && ph))
}

/// Residues `a` in `1..=d` for which `a omega_i + phi_i ≢ pi/2 (mod pi)` for every
/// pair; `d` is the lcm of the denominators of the `pi`-rational `omega_i`.
pub(crate) struct ResidueAnalysis {
    pub witnesses: Vec<Option<PiRationalWitness>>,
    pub d: u64,
    pub good_residues: Vec<u64>,
}

pub(crate) fn analyse_residues(pairs: &[AnglePair]) -> Result<ResidueAnalysis, OscillationError> {
    let witnesses: Vec<Option<PiRationalWitness>> = pairs.iter().map(|p| detect_pi_rational_default(&p.omega)).collect();
    let mut d = 1u64;
    for w in witnesses.iter().flatten() {
        d = d.lcm(&w.d);
        if d > DEFAULT_D_MAX {
            return Err(OscillationError::Undecidable(format!("common denominator {d} exceeds {DEFAULT_D_MAX}")));
        }
    }
    let mut good = Vec::new();
    for a in 1..=d {
        let ab = BigInt::from(a);
        let mut ok = true;
        for (p, w) in pairs.iter().zip(&witnesses) {
            if w.is_some() && congruent_mod_pi(&p.omega.mul_add(&ab, &p.phi), &half())? {
                ok = false;
                break;
            }
        }
        if ok {
            good.push(a);
        }
    }
    Ok(ResidueAnalysis { witnesses, d, good_residues: good })
}

/// Hypothesis for several pairs: infinitely many `n` with `n omega_i + phi_i ≢ pi/2`
/// for all `i`. Exclusions from `pi`-irrational `omega_i` are single points and
/// cannot block, so only residue classes mod `d` matter.
pub fn hypothesis_multi(pairs: &[AnglePair]) -> Result<bool, OscillationError> {
    if pairs.is_empty() {
        return Err(OscillationError::NoPairs);
    }
    Ok(!analyse_residues(pairs)?.good_residues.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::highprec::euler_e;

    fn pair(w: &str, p: &str) -> AnglePair {
        AnglePair::parse(w, p, 60).unwrap()
    }

    #[test]
    fn single_hypothesis_examples() {
        assert!(!hypothesis_single(&pair("0", "pi/2")).unwrap());
        assert!(hypothesis_single(&pair("1", "0")).unwrap());
        assert!(!hypothesis_single(&pair("pi", "1/2*pi")).unwrap());
        assert!(!hypothesis_single(&pair("-3*pi", "-pi/2")).unwrap());
        assert!(hypothesis_single(&pair("0", "1")).unwrap());
    }

    #[test]
    fn numeric_congruence_and_gray_zone() {
        let near = Angle::from_value(HighPrecReal::from_rat(&rat(1, 1), 60).mul_rat(&tol_from_log10(-50)));
        assert!(congruent_mod_pi(&near, &BigRat::zero()).unwrap());
        let far = Angle::from_value(HighPrecReal::from_rat(&tol_from_log10(-30), 60));
        assert!(!congruent_mod_pi(&far, &BigRat::zero()).unwrap());
        // |omega/pi| sits right on the tolerance
        let pi_tol = crate::highprec::pi(70).mul_rat(&tol_from_log10(CONGRUENCE_TOL_LOG10)).with_digits(60);
        let edge = Angle::from_value(pi_tol);
        assert!(matches!(congruent_mod_pi(&edge, &BigRat::zero()), Err(OscillationError::Undecidable(_))));
    }

    #[test]
    fn multi_hypothesis_examples() {
        assert!(!hypothesis_multi(&[pair("pi/2", "pi/2"), pair("pi/2", "0")]).unwrap());
        assert!(!hypothesis_multi(&[pair("0", "pi/2")]).unwrap());
        assert!(hypothesis_multi(&[pair("1", "0"), pair("pi/3", "0")]).unwrap());
        assert!(hypothesis_multi(&[]).is_err());
    }

    #[test]
    fn detect_examples() {
        let w = detect_pi_rational_default(&Angle::parse("pi/3", 60).unwrap()).unwrap();
        assert_eq!((w.c.clone(), w.d), (BigInt::from(1), 3));
        let w = detect_pi_rational_default(&Angle::parse("2*pi", 60).unwrap()).unwrap();
        assert_eq!((w.c.clone(), w.d), (BigInt::from(2), 1));
        assert!(detect_pi_rational_default(&Angle::parse("1", 60).unwrap()).is_none());
    }

    #[test]
    fn detect_numeric_pi_multiple() {
        // pi * 22/7 given only as a number
        let v = crate::highprec::pi(60).mul_rat(&rat(22, 7));
        let w = detect_pi_rational_default(&Angle::from_value(v)).unwrap();
        assert_eq!((w.c, w.d), (BigInt::from(22), 7));
        assert!(detect_pi_rational_default(&Angle::from_value(euler_e(60))).is_none());
    }

    // Independent oracle: convergents of 1/pi from f64 continued fraction up
    // to q ~ 10^6 all miss by far more than 1e-30.
    #[test]
    fn one_over_pi_convergents_are_far() {
        let x = Angle::parse("1", 60).unwrap().over_pi;
        let tol = tol_from_log10(-30);
        assert!(rational_approximation(&x, DEFAULT_D_MAX, &tol).is_none());
        let (_, q, res) = rational_approximation(&x, DEFAULT_D_MAX, &tol_from_log10(-9)).unwrap();
        assert!(q <= DEFAULT_D_MAX && res.to_f64() < 1e-9);
    }
}
