use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::OscillationError;
use crate::exact::{parse_rat, rat_to_string, BigRat};
use crate::highprec::{euler_e, pi, sqrt_int, HighPrecReal};

/// Smallest accepted angle precision.
pub const MIN_ANGLE_DIGITS: u32 = 40;
pub const DEFAULT_ANGLE_DIGITS: u32 = 60;
const EXTRA: u32 = 5;

/// `pi_coeff * pi + rational`, known exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PiLinear {
    #[serde(serialize_with = "ser_rat")]
    pub pi_coeff: BigRat,
    #[serde(serialize_with = "ser_rat")]
    pub rational: BigRat,
}

pub(crate) fn ser_rat<S: serde::Serializer>(x: &BigRat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rat_to_string(x))
}

/// A real angle in radians, with `angle / pi` alongside.
#[derive(Debug, Clone, Serialize)]
pub struct Angle {
    pub value: HighPrecReal,
    pub over_pi: HighPrecReal,
    /// Present when the angle was given as `r pi + q` with rational `r`, `q`.
    pub exact: Option<PiLinear>,
}

impl Angle {
    pub fn pi_linear(pi_coeff: BigRat, rational: BigRat, digits: u32) -> Self {
        let work = digits + EXTRA;
        let p = pi(work);
        let value = (&p.mul_rat(&pi_coeff) + &HighPrecReal::from_rat(&rational, work)).with_digits(digits);
        let over_pi = if rational.is_zero() {
            HighPrecReal::from_rat(&pi_coeff, digits)
        } else {
            let q_over_pi = HighPrecReal::from_rat(&rational, work)
                .checked_div(&p)
                .expect("pi is nonzero");
            (&q_over_pi + &HighPrecReal::from_rat(&pi_coeff, work)).with_digits(digits)
        };
        Self { value, over_pi, exact: Some(PiLinear { pi_coeff, rational }) }
    }

    pub fn from_value(value: HighPrecReal) -> Self {
        let digits = value.digits();
        let work = value.with_digits(digits + EXTRA);
        let over_pi = work.checked_div(&pi(digits + EXTRA)).expect("pi is nonzero").with_digits(digits);
        Self { value, over_pi, exact: None }
    }

    /// Parses `rational * pi + rational` and friends; see [`parse_angle_expr`].
    pub fn parse(text: &str, digits: u32) -> Result<Self, OscillationError> {
        if digits < MIN_ANGLE_DIGITS {
            return Err(OscillationError::PrecisionTooLow { have: digits, min: MIN_ANGLE_DIGITS });
        }
        let expr = parse_angle_expr(text)?;
        if expr.is_pi_linear() {
            let pi_coeff = expr.coeff(Atom::Pi);
            let rational = expr.coeff(Atom::One);
            return Ok(Self::pi_linear(pi_coeff, rational, digits));
        }
        Ok(Self::from_value(expr.eval(digits + EXTRA).with_digits(digits)))
    }

    pub fn zero(digits: u32) -> Self {
        Self::pi_linear(BigRat::zero(), BigRat::zero(), digits)
    }

    pub fn digits(&self) -> u32 {
        self.value.digits()
    }

    /// `k * self + other`.
    pub fn mul_add(&self, k: &BigInt, other: &Angle) -> Angle {
        let kr = BigRat::from_integer(k.clone());
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(PiLinear {
                pi_coeff: &a.pi_coeff * &kr + &b.pi_coeff,
                rational: &a.rational * &kr + &b.rational,
            }),
            _ => None,
        };
        Angle {
            value: &self.value.mul_int(k) + &other.value,
            over_pi: &self.over_pi.mul_int(k) + &other.over_pi,
            exact,
        }
    }

    pub fn with_digits(&self, digits: u32) -> Angle {
        match &self.exact {
            Some(e) => Self::pi_linear(e.pi_coeff.clone(), e.rational.clone(), digits),
            None => Angle {
                value: self.value.with_digits(digits),
                over_pi: self.over_pi.with_digits(digits),
                exact: None,
            },
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(e) => write!(f, "{}*pi + {}", rat_to_string(&e.pi_coeff), rat_to_string(&e.rational)),
            None => write!(f, "{}", self.value.to_sci_string(20)),
        }
    }
}

/// `(omega, phi)`, both in radians.
#[derive(Debug, Clone, Serialize)]
pub struct AnglePair {
    pub omega: Angle,
    pub phi: Angle,
}

impl AnglePair {
    pub fn new(omega: Angle, phi: Angle) -> Result<Self, OscillationError> {
        let have = omega.digits().min(phi.digits());
        if have < MIN_ANGLE_DIGITS {
            return Err(OscillationError::PrecisionTooLow { have, min: MIN_ANGLE_DIGITS });
        }
        Ok(Self { omega, phi })
    }

    pub fn parse(omega: &str, phi: &str, digits: u32) -> Result<Self, OscillationError> {
        Self::new(Angle::parse(omega, digits)?, Angle::parse(phi, digits)?)
    }

    pub fn digits(&self) -> u32 {
        self.omega.digits().min(self.phi.digits())
    }

    pub fn with_digits(&self, digits: u32) -> Self {
        Self { omega: self.omega.with_digits(digits), phi: self.phi.with_digits(digits) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Atom {
    One,
    Pi,
    E,
    Sqrt(u64),
}

/// Rational combination of `1, pi, e, sqrt(k)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AngleExpr {
    terms: BTreeMap<Atom, BigRat>,
}

impl AngleExpr {
    fn atom(a: Atom) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(a, BigRat::one());
        Self { terms }
    }

    fn rational(q: BigRat) -> Self {
        let mut e = Self::default();
        if !q.is_zero() {
            e.terms.insert(Atom::One, q);
        }
        e
    }

    fn as_rational(&self) -> Option<BigRat> {
        match self.terms.len() {
            0 => Some(BigRat::zero()),
            1 => self.terms.get(&Atom::One).cloned(),
            _ => None,
        }
    }

    fn coeff(&self, a: Atom) -> BigRat {
        self.terms.get(&a).cloned().unwrap_or_else(BigRat::zero)
    }

    fn is_pi_linear(&self) -> bool {
        self.terms.keys().all(|a| matches!(a, Atom::One | Atom::Pi))
    }

    fn add(mut self, other: Self, sign: i32) -> Self {
        for (a, c) in other.terms {
            let c = if sign < 0 { -c } else { c };
            let e = self.terms.entry(a).or_insert_with(BigRat::zero);
            *e += c;
            if e.is_zero() {
                self.terms.remove(&a);
            }
        }
        self
    }

    fn scale(mut self, k: &BigRat) -> Self {
        if k.is_zero() {
            return Self::default();
        }
        for c in self.terms.values_mut() {
            *c *= k;
        }
        self
    }

    /// Numeric value at `digits`.
    pub fn eval(&self, digits: u32) -> HighPrecReal {
        let mut acc = HighPrecReal::zero(digits);
        for (a, c) in &self.terms {
            let v = match a {
                Atom::One => HighPrecReal::from_rat(c, digits),
                Atom::Pi => pi(digits).mul_rat(c),
                Atom::E => euler_e(digits).mul_rat(c),
                Atom::Sqrt(k) => sqrt_int(*k, digits).mul_rat(c),
            };
            acc = &acc + &v;
        }
        acc
    }
}

/// Grammar: sums and differences of products of rational literals and the
/// constants `pi`, `e`, `sqrt2` / `sqrt(k)`, with division by rationals and
/// parentheses. At most one non-rational factor per product.
pub fn parse_angle_expr(text: &str) -> Result<AngleExpr, OscillationError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, text };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigRat),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>, OscillationError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent only when a digit follows, so `2e` stays `2 e`
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit: String = chars[start..i].iter().collect();
            let q = parse_rat(&lit).map_err(|e| OscillationError::Parse(format!("{text}: {e}")))?;
            out.push(Token::Num(q));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(OscillationError::Parse(format!("{text}: unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> OscillationError {
        OscillationError::Parse(format!("{}: {msg}", self.text))
    }

    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<AngleExpr, OscillationError> {
        let mut sign = 1;
        if let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            sign = if c == '-' { -1 } else { 1 };
        }
        let mut acc = AngleExpr::default().add(self.term()?, sign);
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            acc = acc.add(self.term()?, if c == '-' { -1 } else { 1 });
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<AngleExpr, OscillationError> {
        let mut acc = self.factor()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = if c == '*' {
                match (acc.as_rational(), rhs.as_rational()) {
                    (Some(a), _) => rhs.scale(&a),
                    (_, Some(b)) => acc.scale(&b),
                    _ => return Err(self.error("product of two irrational constants")),
                }
            } else {
                match rhs.as_rational() {
                    Some(b) if !b.is_zero() => acc.scale(&b.recip()),
                    Some(_) => return Err(self.error("division by zero")),
                    None => return Err(self.error("division by an irrational constant")),
                }
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<AngleExpr, OscillationError> {
        let tok = self.tokens.get(self.pos).cloned().ok_or_else(|| self.error("unexpected end"))?;
        self.pos += 1;
        match tok {
            Token::Num(q) => Ok(AngleExpr::rational(q)),
            Token::Op('(') => {
                let e = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(self.error("missing ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Token::Op('-') => Ok(self.factor()?.scale(&-BigRat::one())),
            Token::Ident(name) => self.constant(&name),
            Token::Op(c) => Err(self.error(&format!("unexpected '{c}'"))),
        }
    }

    fn constant(&mut self, name: &str) -> Result<AngleExpr, OscillationError> {
        match name {
            "pi" => Ok(AngleExpr::atom(Atom::Pi)),
            "e" => Ok(AngleExpr::atom(Atom::E)),
            "sqrt" => {
                if self.peek_op() != Some('(') {
                    return Err(self.error("sqrt needs an argument"));
                }
                self.pos += 1;
                let k = match self.tokens.get(self.pos) {
                    Some(Token::Num(q)) if q.is_integer() && !q.is_negative() => q.to_integer(),
                    _ => return Err(self.error("sqrt takes a non-negative integer")),
                };
                self.pos += 1;
                if self.peek_op() != Some(')') {
                    return Err(self.error("missing ')'"));
                }
                self.pos += 1;
                sqrt_atom(&k).ok_or_else(|| self.error("sqrt argument too large"))
            }
            _ => match name.strip_prefix("sqrt").and_then(|d| d.parse::<u64>().ok()) {
                Some(k) => sqrt_atom(&BigInt::from(k)).ok_or_else(|| self.error("sqrt argument too large")),
                None => Err(self.error(&format!("unknown constant '{name}'"))),
            },
        }
    }
}

fn sqrt_atom(k: &BigInt) -> Option<AngleExpr> {
    let k: u64 = k.try_into().ok()?;
    let r = num_integer::Roots::sqrt(&k);
    if r * r == k {
        return Some(AngleExpr::rational(BigRat::from_integer(BigInt::from(r))));
    }
    // pull out square factors so equal surds share an atom
    let mut core = k;
    let mut outside = 1u64;
    let mut f = 2u64;
    while f * f <= core {
        while core % (f * f) == 0 {
            core /= f * f;
            outside *= f;
        }
        f += 1;
    }
    Some(AngleExpr::atom(Atom::Sqrt(core)).scale(&BigRat::from_integer(BigInt::from(outside))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    #[test]
    fn parses_pi_linear_forms() {
        let a = Angle::parse("1/3*pi", 60).unwrap();
        assert_eq!(a.exact, Some(PiLinear { pi_coeff: rat(1, 3), rational: rat_int(0) }));
        assert_eq!(a.over_pi.to_rat(), HighPrecReal::from_rat(&rat(1, 3), 60).to_rat());
        let b = Angle::parse("pi/2", 60).unwrap();
        assert_eq!(b.exact.unwrap().pi_coeff, rat(1, 2));
        let c = Angle::parse("1 + pi", 60).unwrap();
        assert_eq!(c.exact, Some(PiLinear { pi_coeff: rat_int(1), rational: rat_int(1) }));
        let d = Angle::parse("-0.25", 60).unwrap();
        assert_eq!(d.exact.unwrap().rational, rat(-1, 4));
    }

    #[test]
    fn numeric_constants() {
        let s = Angle::parse("sqrt2", 60).unwrap();
        assert!(s.exact.is_none());
        assert!((s.value.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        let s8 = parse_angle_expr("sqrt(8)").unwrap();
        assert_eq!(s8, parse_angle_expr("2*sqrt2").unwrap());
        assert_eq!(parse_angle_expr("sqrt(9)").unwrap(), parse_angle_expr("3").unwrap());
        let e = Angle::parse("e", 60).unwrap();
        assert!((e.value.to_f64() - std::f64::consts::E).abs() < 1e-15);
        let x = Angle::parse("1.5e-3", 60).unwrap();
        assert_eq!(x.exact.unwrap().rational, rat(3, 2000));
        let y = Angle::parse("2e", 60);
        assert!(y.is_err());
    }

    #[test]
    fn over_pi_of_rational_angle() {
        let a = Angle::parse("1", 60).unwrap();
        assert!((a.over_pi.to_f64() - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        assert!(a.over_pi.error_log10() < -45.0);
    }

    #[test]
    fn rejects_bad_input() {
        for s in ["", "pi*pi", "1/0", "pi/e", "foo", "(1", "1 2", "sqrt(-1)"] {
            assert!(parse_angle_expr(s).is_err(), "{s}");
        }
        assert!(matches!(Angle::parse("1", 20), Err(OscillationError::PrecisionTooLow { .. })));
    }

    #[test]
    fn mul_add_keeps_exactness() {
        let w = Angle::parse("1/3*pi", 60).unwrap();
        let p = Angle::parse("1/2*pi", 60).unwrap();
        let c = w.mul_add(&BigInt::from(3), &p);
        assert_eq!(c.exact.unwrap().pi_coeff, rat(3, 2));
    }
}
