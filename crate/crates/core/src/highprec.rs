//! Fixed-point decimal reals with a tracked error bound.
//!
//! A [`HighPrecReal`] with `digits = D` stores an integer mantissa `m` and
//! represents `m / 10^(D + GUARD_DIGITS)`. Every operation carries a
//! conservative bound `err` on the distance to the true value, counted in
//! units of the last stored place. The value is *guaranteed* to `D` digits
//! while `err <= 10^GUARD_DIGITS`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::exact::{log2_biguint, BigRat};

/// Extra decimal places carried below the guaranteed digits.
pub const GUARD_DIGITS: u32 = 10;

thread_local! {
    static POW10: RefCell<HashMap<u32, BigInt>> = RefCell::new(HashMap::new());
}

/// `10^k`, memoized per thread.
pub fn pow10(k: u32) -> BigInt {
    POW10.with(|cache| {
        cache
            .borrow_mut()
            .entry(k)
            .or_insert_with(|| BigInt::from(10u32).pow(k))
            .clone()
    })
}

fn pow10_u(k: u32) -> BigUint {
    pow10(k).into_parts().1
}

/// `n / d` rounded to nearest, `d > 0`.
pub(crate) fn div_round(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_mod_floor(d);
    if (r << 1u32) >= *d {
        q + 1
    } else {
        q
    }
}

fn ceil_div_u(n: &BigUint, d: &BigUint) -> BigUint {
    let (q, r) = n.div_rem(d);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HighPrecReal {
    mant: BigInt,
    digits: u32,
    err: BigUint,
}

impl HighPrecReal {
    pub fn zero(digits: u32) -> Self {
        Self::from_parts(BigInt::zero(), digits, BigUint::zero())
    }

    pub fn from_parts(mant: BigInt, digits: u32, err: BigUint) -> Self {
        Self { mant, digits, err }
    }

    pub fn from_int<T: Into<BigInt>>(v: T, digits: u32) -> Self {
        let mant = v.into() * pow10(digits + GUARD_DIGITS);
        Self::from_parts(mant, digits, BigUint::zero())
    }

    /// Nearest fixed-point value to an exact rational.
    pub fn from_rat(x: &BigRat, digits: u32) -> Self {
        let scaled = x.numer() * pow10(digits + GUARD_DIGITS);
        let (q, r) = scaled.div_mod_floor(x.denom());
        if r.is_zero() {
            return Self::from_parts(q, digits, BigUint::zero());
        }
        let mant = if (r << 1u32) >= *x.denom() { q + 1 } else { q };
        Self::from_parts(mant, digits, BigUint::one())
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Number of stored decimal places, `digits + GUARD_DIGITS`.
    pub fn scale(&self) -> u32 {
        self.digits + GUARD_DIGITS
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn error_ulps(&self) -> &BigUint {
        &self.err
    }

    /// `log10` of the absolute error bound (`-inf` for exact values).
    pub fn error_log10(&self) -> f64 {
        log2_biguint(&self.err) * std::f64::consts::LOG10_2 - self.scale() as f64
    }

    /// The absolute error bound as an exact rational.
    pub fn error_bound(&self) -> BigRat {
        BigRat::new(BigInt::from(self.err.clone()), pow10(self.scale()))
    }

    /// True while the tracked error is within `10^-digits`.
    pub fn is_guaranteed(&self) -> bool {
        self.err <= pow10_u(GUARD_DIGITS)
    }

    /// Exact rational value of the stored mantissa.
    pub fn to_rat(&self) -> BigRat {
        BigRat::new(self.mant.clone(), pow10(self.scale()))
    }

    pub fn to_f64(&self) -> f64 {
        let m = self.mant.magnitude();
        let l2 = log2_biguint(m);
        if !l2.is_finite() {
            return 0.0;
        }
        let v = (l2 - self.scale() as f64 * std::f64::consts::LOG2_10).exp2();
        if self.mant.is_negative() {
            -v
        } else {
            v
        }
    }

    /// `log10 |x|` of the stored value; `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        log2_biguint(self.mant.magnitude()) * std::f64::consts::LOG10_2 - self.scale() as f64
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self::from_parts(self.mant.abs(), self.digits, self.err.clone())
    }

    /// True when zero lies inside the error interval.
    pub fn contains_zero(&self) -> bool {
        self.mant.magnitude() <= &self.err
    }

    /// Changes the number of carried digits, rounding when shrinking.
    pub fn with_digits(&self, digits: u32) -> Self {
        match digits.cmp(&self.digits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let up = digits - self.digits;
                Self::from_parts(&self.mant * pow10(up), digits, &self.err * pow10_u(up))
            }
            Ordering::Less => {
                let down = self.digits - digits;
                let p = pow10(down);
                let mant = div_round(&self.mant, &p);
                let err = ceil_div_u(&self.err, p.magnitude()) + 1u32;
                Self::from_parts(mant, digits, err)
            }
        }
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        let d = a.digits.min(b.digits);
        (a.with_digits(d), b.with_digits(d))
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self::from_parts(&self.mant * k, self.digits, &self.err * k.magnitude())
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        assert!(!k.is_zero(), "division by zero");
        let (mant, kk) = if k.is_negative() {
            (-&self.mant, -k)
        } else {
            (self.mant.clone(), k.clone())
        };
        let q = div_round(&mant, &kk);
        let err = ceil_div_u(&self.err, kk.magnitude()) + 1u32;
        Self::from_parts(q, self.digits, err)
    }

    /// Multiplication by an exact rational.
    pub fn mul_rat(&self, x: &BigRat) -> Self {
        let q = div_round(&(&self.mant * x.numer()), x.denom());
        let err = ceil_div_u(&(&self.err * x.numer().magnitude()), x.denom().magnitude()) + 1u32;
        Self::from_parts(q, self.digits, err)
    }

    /// Quotient, or `None` when the divisor's error interval contains zero.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let (a, b) = Self::aligned(self, other);
        let bm = b.mant.magnitude();
        if bm <= &b.err {
            return None;
        }
        let scale = pow10(a.scale());
        let (num, den) = if b.mant.is_negative() {
            (-(&a.mant * &scale), -&b.mant)
        } else {
            (&a.mant * &scale, b.mant.clone())
        };
        let q = div_round(&num, &den);
        // |A/B - a/b| <= (ea + |a/b| eb) / (|b| - eb), all in scaled units.
        let slack = bm - &b.err;
        let numer_err = &a.err * scale.magnitude() + (q.magnitude() + 1u32) * &b.err;
        let err = ceil_div_u(&numer_err, &slack) + 1u32;
        Some(Self::from_parts(q, a.digits, err))
    }

    pub fn sqrt(&self) -> Option<Self> {
        if self.mant.is_negative() {
            return None;
        }
        let scale = pow10(self.scale());
        let r = (&self.mant * &scale).sqrt();
        let err = if r.is_zero() {
            (&self.err * scale.magnitude()).sqrt() + 2u32
        } else {
            ceil_div_u(&(&self.err * scale.magnitude()), r.magnitude()) + 2u32
        };
        Some(Self::from_parts(r, self.digits, err))
    }

    /// Largest integer not above the stored value.
    pub fn floor(&self) -> BigInt {
        self.mant.div_floor(&pow10(self.scale()))
    }

    /// Stored value minus its floor, in `[0, 1)`.
    pub fn frac(&self) -> Self {
        let m = self.mant.mod_floor(&pow10(self.scale()));
        Self::from_parts(m, self.digits, self.err.clone())
    }

    /// Distance from the stored value to the nearest integer.
    pub fn dist_to_int(&self) -> Self {
        let one = pow10(self.scale());
        let m = self.mant.mod_floor(&one);
        let other = &one - &m;
        Self::from_parts(m.min(other), self.digits, self.err.clone())
    }

    /// Decimal rendering with `places` digits after the point (rounded).
    pub fn to_decimal_string(&self, places: u32) -> String {
        let places = places.min(self.scale());
        let m = div_round(&self.mant, &pow10(self.scale() - places));
        let neg = m.is_negative();
        let digits = m.magnitude().to_string();
        let body = if places == 0 {
            digits
        } else {
            let padded = format!("{:0>width$}", digits, width = places as usize + 1);
            let (i, f) = padded.split_at(padded.len() - places as usize);
            format!("{i}.{f}")
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    /// Scientific notation with `sig` significant digits, e.g. `-1.234e-56`.
    pub fn to_sci_string(&self, sig: u32) -> String {
        if self.mant.is_zero() {
            return "0".to_string();
        }
        let text = self.mant.magnitude().to_string();
        let sig = (sig.max(1) as usize).min(text.len());
        let exp = text.len() as i64 - 1 - self.scale() as i64;
        let lead = &text[..sig];
        let mantissa = if sig > 1 {
            format!("{}.{}", &lead[..1], &lead[1..])
        } else {
            lead.to_string()
        };
        let sign = if self.mant.is_negative() { "-" } else { "" };
        format!("{sign}{mantissa}e{exp}")
    }
}

impl PartialOrd for HighPrecReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (a, b) = Self::aligned(self, other);
        Some(a.mant.cmp(&b.mant))
    }
}

impl fmt::Display for HighPrecReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string(self.digits))
    }
}

impl Serialize for HighPrecReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'a> Add<&'a HighPrecReal> for &'a HighPrecReal {
    type Output = HighPrecReal;
    fn add(self, rhs: &HighPrecReal) -> HighPrecReal {
        let (a, b) = HighPrecReal::aligned(self, rhs);
        HighPrecReal::from_parts(a.mant + b.mant, a.digits, a.err + b.err)
    }
}

impl<'a> Sub<&'a HighPrecReal> for &'a HighPrecReal {
    type Output = HighPrecReal;
    fn sub(self, rhs: &HighPrecReal) -> HighPrecReal {
        let (a, b) = HighPrecReal::aligned(self, rhs);
        HighPrecReal::from_parts(a.mant - b.mant, a.digits, a.err + b.err)
    }
}

impl<'a> Mul<&'a HighPrecReal> for &'a HighPrecReal {
    type Output = HighPrecReal;
    fn mul(self, rhs: &HighPrecReal) -> HighPrecReal {
        let (a, b) = HighPrecReal::aligned(self, rhs);
        let scale = pow10(a.scale());
        let mant = div_round(&(&a.mant * &b.mant), &scale);
        let cross = a.mant.magnitude() * &b.err + b.mant.magnitude() * &a.err + &a.err * &b.err;
        let err = ceil_div_u(&cross, scale.magnitude()) + 1u32;
        HighPrecReal::from_parts(mant, a.digits, err)
    }
}

impl Neg for &HighPrecReal {
    type Output = HighPrecReal;
    fn neg(self) -> HighPrecReal {
        HighPrecReal::from_parts(-&self.mant, self.digits, self.err.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<HighPrecReal> for HighPrecReal {
            type Output = HighPrecReal;
            fn $m(self, rhs: HighPrecReal) -> HighPrecReal {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

// Extra working digits for constant and series evaluation.
const INNER: u32 = 8;

/// pi from Machin's formula `16 atan(1/5) - 4 atan(1/239)`, cached at the
/// largest precision requested so far.
pub fn pi(digits: u32) -> HighPrecReal {
    static CACHE: OnceLock<Mutex<Option<(u32, BigInt)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(None));
    let scale = digits + GUARD_DIGITS;
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    let stored = match guard.as_ref() {
        Some((s, m)) if *s >= scale => (*s, m.clone()),
        _ => {
            let s = scale.max(guard.as_ref().map_or(0, |(s, _)| *s));
            let m = machin_pi(s);
            *guard = Some((s, m.clone()));
            (s, m)
        }
    };
    drop(guard);
    // The cached mantissa is within 2 units at its own scale.
    HighPrecReal::from_parts(stored.1, stored.0 - GUARD_DIGITS, BigUint::from(2u32)).with_digits(digits)
}

fn machin_pi(scale: u32) -> BigInt {
    let one = pow10(scale + INNER);
    let pi = arctan_inv(5, &one) * 16 - arctan_inv(239, &one) * 4;
    div_round(&pi, &pow10(INNER))
}

// atan(1/x) at the fixed-point unit `one`; truncation error <= 2 units per term.
fn arctan_inv(x: u32, one: &BigInt) -> BigInt {
    let x2 = BigInt::from(x) * x;
    let mut power = one / x;
    let mut sum = power.clone();
    let mut k = 1u32;
    loop {
        power /= &x2;
        if power.is_zero() {
            break;
        }
        let term = &power / (2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

/// Euler's number from `sum 1/k!`.
pub fn euler_e(digits: u32) -> HighPrecReal {
    let scale = digits + GUARD_DIGITS;
    let mut term = pow10(scale + INNER);
    let mut sum = BigInt::zero();
    let mut k = 1u32;
    while !term.is_zero() {
        sum += &term;
        term /= k;
        k += 1;
    }
    let mant = div_round(&sum, &pow10(INNER));
    HighPrecReal::from_parts(mant, digits, BigUint::from(2u32))
}

/// `sqrt(k)` for a non-negative integer.
pub fn sqrt_int(k: u64, digits: u32) -> HighPrecReal {
    HighPrecReal::from_int(k, digits)
        .sqrt()
        .expect("non-negative argument")
}

/// `cos(pi y)`.
pub fn cos_pi(y: &HighPrecReal) -> HighPrecReal {
    trig_pi(y, false)
}

/// `sin(pi y)`.
pub fn sin_pi(y: &HighPrecReal) -> HighPrecReal {
    trig_pi(y, true)
}

/// `cos(x)` for `x` in radians.
pub fn cos(x: &HighPrecReal) -> HighPrecReal {
    let y = x.checked_div(&pi(x.digits())).expect("pi is nonzero");
    cos_pi(&y)
}

// Reduces y to [0, 1/4] by the symmetries of cos/sin and sums the Taylor series there.
fn trig_pi(y: &HighPrecReal, want_sin: bool) -> HighPrecReal {
    let digits = y.digits();
    let w = y.with_digits(digits + INNER);
    let unit = pow10(w.scale());
    let two = &unit * 2;
    let half = &unit / 2;
    let quarter = &unit / 4;

    let mut r: BigInt = w.mant.mod_floor(&two);
    let mut sign = 1i32;
    // sin(pi r) = cos(pi (r - 1/2))
    if want_sin {
        r = Integer::mod_floor(&(&r - &half), &two);
    }
    if r > unit {
        r = &two - r;
    }
    if r > half {
        sign = -sign;
        r = &unit - r;
    }
    let use_sin = r > quarter;
    if use_sin {
        r = &half - r;
    }

    let reduced = HighPrecReal::from_parts(r, w.digits, w.err.clone());
    let x = &reduced * &pi(w.digits);
    let (sum, terms) = taylor(&x.mant, &unit, use_sin);
    let err = &x.err * 2u32 + 3u32 * (terms + 1);
    let mant = if sign < 0 { -sum } else { sum };
    HighPrecReal::from_parts(mant, w.digits, err).with_digits(digits)
}

fn taylor(x: &BigInt, unit: &BigInt, sine: bool) -> (BigInt, u32) {
    let x2 = div_round(&(x * x), unit);
    let mut term = if sine { x.clone() } else { unit.clone() };
    let mut sum = term.clone();
    let mut k: u64 = if sine { 1 } else { 0 };
    let mut terms = 0u32;
    loop {
        term = div_round(&(&term * &x2), unit);
        term = div_round(&term, &BigInt::from((k + 1) * (k + 2)));
        k += 2;
        terms += 1;
        if term.is_zero() {
            break;
        }
        if terms % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
    }
    (sum, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_rat, rat};

    const PI_60: &str = "3.141592653589793238462643383279502884197169399375105820974944";
    const E_50: &str = "2.71828182845904523536028747135266249775724709369995";
    const SQRT2_50: &str = "1.41421356237309504880168872420969807856967187537694";

    fn close(a: &HighPrecReal, reference: &str, tol_log10: f64) -> bool {
        let r = HighPrecReal::from_rat(&parse_rat(reference).unwrap(), a.digits());
        let d = (a - &r).abs();
        d.is_zero_mant() || d.log10_abs() < tol_log10
    }

    impl HighPrecReal {
        fn is_zero_mant(&self) -> bool {
            self.mant.is_zero()
        }
    }

    #[test]
    fn constants_match_published_digits() {
        let p = pi(60);
        assert!(close(&p, PI_60, -59.0));
        assert!(p.is_guaranteed());
        assert!(close(&euler_e(50), E_50, -49.0));
        assert!(close(&sqrt_int(2, 50), SQRT2_50, -49.0));
    }

    #[test]
    fn pi_cache_serves_lower_precision() {
        let hi = pi(200);
        let lo = pi(30);
        assert_eq!(lo, hi.with_digits(30).with_parts_err(lo.err.clone()));
        assert!(close(&lo, PI_60, -29.0));
    }

    impl HighPrecReal {
        fn with_parts_err(mut self, err: BigUint) -> Self {
            self.err = err;
            self
        }
    }

    #[test]
    fn arithmetic_tracks_error() {
        let third = HighPrecReal::from_rat(&rat(1, 3), 30);
        assert_eq!(third.error_ulps(), &BigUint::one());
        let one = &third.mul_int(&BigInt::from(3)) - &HighPrecReal::from_int(1, 30);
        assert!(one.contains_zero());
        let sq = &third * &third;
        assert!(close(&sq, "1/9", -29.0));
        let q = HighPrecReal::from_int(1, 30)
            .checked_div(&HighPrecReal::from_int(7, 30))
            .unwrap();
        assert!(close(&q, "1/7", -29.0));
        assert!(q.is_guaranteed());
        assert!(HighPrecReal::from_int(1, 30).checked_div(&HighPrecReal::zero(30)).is_none());
    }

    #[test]
    fn trig_values() {
        let d = 50;
        let third = HighPrecReal::from_rat(&rat(1, 3), d);
        assert!(close(&cos_pi(&third), "1/2", -48.0));
        assert!(close(&sin_pi(&HighPrecReal::from_rat(&rat(1, 6), d)), "1/2", -48.0));
        assert!(close(&cos_pi(&HighPrecReal::from_int(7, d)), "-1", -48.0));
        assert!(close(&cos_pi(&HighPrecReal::from_rat(&rat(-5, 2), d)), "0", -48.0));
        // cos(1) to 40 places
        let c1 = cos(&HighPrecReal::from_int(1, d));
        assert!(close(&c1, "0.5403023058681397174009366074429766037323", -39.0));
        let s = sin_pi(&HighPrecReal::from_rat(&rat(1, 4), d));
        let h = sqrt_int(2, d).div_int(&BigInt::from(2));
        assert!((&s - &h).abs().log10_abs() < -48.0);
    }

    #[test]
    fn decimal_rendering() {
        let x = HighPrecReal::from_rat(&rat(-1, 8), 5);
        assert_eq!(x.to_decimal_string(3), "-0.125");
        assert_eq!(HighPrecReal::from_rat(&rat(1, 3), 4).to_string(), "0.3333");
        assert_eq!(HighPrecReal::from_rat(&rat(3, 2000), 10).to_sci_string(3), "1.50e-3");
    }

    #[test]
    fn frac_and_floor() {
        let x = HighPrecReal::from_rat(&rat(-7, 4), 10);
        assert_eq!(x.floor(), BigInt::from(-2));
        assert_eq!(x.frac().to_rat(), rat(1, 4));
        assert_eq!(x.dist_to_int().to_rat(), rat(1, 4));
    }
}
