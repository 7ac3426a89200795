//! Exact arithmetic in the real quadratic field `Q(√d)`.
//!
//! A [`Quad`] is a number `a + b·√d` with rational `a`, `b` and a square-free
//! integer `d ≥ 2`. Because `√d` is irrational the pair `(a, b)` is unique,
//! so equality is structural and ordering reduces to an exact sign test on
//! integers. No decision anywhere in the crate goes through floating point.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Surd used when nothing else is specified.
pub const DEFAULT_SURD: u32 = 2;

/// Returns `true` when `d ≥ 2` and no prime square divides `d`.
pub fn is_square_free(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// An element `a + b·√d` of `Q(√d)`.
///
/// Values with `b = 0` are plain rationals and combine freely with any
/// surd. Two values with non-zero irrational parts must share `d`; the
/// operator impls panic otherwise, [`Quad::try_add`] and friends report it
/// as [`Error::Domain`].
#[derive(Clone, Debug)]
pub struct Quad {
    a: Rational,
    b: Rational,
    d: u32,
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl Quad {
    /// Builds `a + b·√d`. Panics if `d` is not square-free or is below 2.
    pub fn new(a: Rational, b: Rational, d: u32) -> Self {
        assert!(is_square_free(d as u64), "surd {d} must be square-free and at least 2");
        Quad { a, b, d }
    }

    pub fn try_new(a: Rational, b: Rational, d: u32) -> Result<Self, Error> {
        if !is_square_free(d as u64) {
            return Err(Error::Domain(format!("surd {d} must be square-free and at least 2")));
        }
        Ok(Quad { a, b, d })
    }

    pub fn rational(a: Rational) -> Self {
        Quad { a, b: Rational::zero(), d: DEFAULT_SURD }
    }

    pub fn from_int(n: i64) -> Self {
        Quad::rational(rat(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Quad::rational(Rational::from_integer(n))
    }

    /// `p/q` as a rational Quad. Panics on `q = 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Quad::rational(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `a + b·√d` from small integers.
    pub fn from_ints(a: i64, b: i64, d: u32) -> Self {
        Quad::new(rat(a), rat(b), d)
    }

    /// The surd `√d` itself.
    pub fn sqrt_of(d: u32) -> Self {
        Quad::new(Rational::zero(), Rational::one(), d)
    }

    pub fn zero() -> Self {
        Quad::from_int(0)
    }

    pub fn one() -> Self {
        Quad::from_int(1)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn surd_part(&self) -> &Rational {
        &self.b
    }

    pub fn surd(&self) -> u32 {
        self.d
    }

    /// Same value, re-tagged with surd `d`. Only meaningful for rational values.
    pub fn with_surd(mut self, d: u32) -> Self {
        debug_assert!(self.b.is_zero() || self.d == d);
        self.d = d;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.b.is_zero() && self.a.is_integer()
    }

    /// The integer value when `self` is an integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.a.to_integer())
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|n| n.to_i64())
    }

    /// Galois conjugate `a − b·√d`.
    pub fn conjugate(&self) -> Self {
        Quad { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// Field norm `a² − d·b²`, rational and non-zero for non-zero `self`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * rat(self.d as i64)
    }

    fn surd_for(&self, other: &Quad) -> Result<u32, Error> {
        if self.b.is_zero() {
            Ok(other.d)
        } else if other.b.is_zero() || self.d == other.d {
            Ok(self.d)
        } else {
            Err(Error::Domain(format!(
                "mixed surds √{} and √{} are not supported",
                self.d, other.d
            )))
        }
    }

    pub fn try_add(&self, other: &Quad) -> Result<Quad, Error> {
        let d = self.surd_for(other)?;
        Ok(Quad { a: &self.a + &other.a, b: &self.b + &other.b, d })
    }

    pub fn try_sub(&self, other: &Quad) -> Result<Quad, Error> {
        let d = self.surd_for(other)?;
        Ok(Quad { a: &self.a - &other.a, b: &self.b - &other.b, d })
    }

    pub fn try_mul(&self, other: &Quad) -> Result<Quad, Error> {
        let d = self.surd_for(other)?;
        let dd = rat(d as i64);
        Ok(Quad {
            a: &self.a * &other.a + &self.b * &other.b * dd,
            b: &self.a * &other.b + &self.b * &other.a,
            d,
        })
    }

    /// Division through the conjugate: `1/(a + b√d) = (a − b√d)/(a² − b²d)`.
    pub fn try_div(&self, other: &Quad) -> Result<Quad, Error> {
        let inv = other.recip()?;
        self.try_mul(&inv)
    }

    pub fn recip(&self) -> Result<Quad, Error> {
        if self.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        let n = self.norm();
        Ok(Quad { a: &self.a / &n, b: -(&self.b / &n), d: self.d })
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, k: &Rational) -> Quad {
        Quad { a: &self.a * k, b: &self.b * k, d: self.d }
    }

    /// Multiplies by a machine integer.
    pub fn scale_int(&self, k: i64) -> Quad {
        let k = rat(k);
        self.scale(&k)
    }

    /// Exact sign of `a + b√d` as −1, 0 or +1.
    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: the part with the larger square wins
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * rat(self.d as i64);
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => unreachable!("√{} is irrational", self.d),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Quad {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Floating-point estimate. Rendering and heuristics only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }

    /// The largest integer `n` with `n ≤ self`.
    pub fn floor(&self) -> BigInt {
        let mut n = self.floor_estimate();
        // exact correction; the estimate is off by at most a couple of units
        while self < &Quad::from_bigint(n.clone()) {
            n -= 1;
        }
        while self >= &Quad::from_bigint(&n + 1) {
            n += 1;
        }
        n
    }

    fn floor_estimate(&self) -> BigInt {
        let f = self.to_f64();
        if f.is_finite() && f.abs() < 1e15 {
            return BigInt::from(f.floor() as i64);
        }
        // integer square root path for large magnitudes
        let a = self.a.floor().to_integer();
        let b2d = &self.b * &self.b * rat(self.d as i64);
        let root = b2d.floor().to_integer().sqrt();
        if self.b.is_negative() {
            a - root - 1
        } else {
            a + root
        }
    }

    /// The smallest integer `n` with `n ≥ self`.
    pub fn ceil(&self) -> BigInt {
        -(-self.clone()).floor()
    }

    /// `self − floor(self)`, always in `[0, 1)`.
    pub fn frac(&self) -> Quad {
        self - &Quad::from_bigint(self.floor())
    }

    /// Decimal approximation with `precision` digits after the point,
    /// rounded to nearest (ties away from zero on exact halves).
    pub fn approx(&self, precision: u32) -> String {
        let scale = BigInt::from(10u32).pow(precision);
        let scaled = self.abs().scale(&Rational::from_integer(scale.clone()));
        let n = (&scaled + &Quad::ratio(1, 2)).floor();
        let digits = n.to_string();
        let sign = if self.is_negative() && !n.is_zero() { "-" } else { "" };
        if precision == 0 {
            return format!("{sign}{digits}");
        }
        let p = precision as usize;
        let padded = if digits.len() <= p { format!("{}{}", "0".repeat(p + 1 - digits.len()), digits) } else { digits };
        let (int, frac) = padded.split_at(padded.len() - p);
        format!("{sign}{int}.{frac}")
    }

    /// Parses a literal, requiring any `sqrt(k)` to use `k = d`; rational
    /// literals are tagged with `d`.
    pub fn parse_with_surd(s: &str, d: u32) -> Result<Quad, Error> {
        let q = parse_literal(s, Some(d))?;
        Ok(if q.is_rational() { q.with_surd(d) } else { q })
    }

    /// Continued-fraction expansion, lazily: yields partial quotients `a₀, a₁, …`.
    ///
    /// Quadratic irrationals have eventually periodic expansions; rational
    /// inputs terminate.
    pub fn continued_fraction(&self) -> ContinuedFraction {
        ContinuedFraction { rest: Some(self.clone()) }
    }
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

/// Iterator over continued-fraction partial quotients.
pub struct ContinuedFraction {
    rest: Option<Quad>,
}

impl Iterator for ContinuedFraction {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let x = self.rest.take()?;
        let a = x.floor();
        let f = &x - &Quad::from_bigint(a.clone());
        if !f.is_zero() {
            self.rest = Some(f.recip().expect("non-zero fractional part"));
        }
        Some(a)
    }
}

/// Convergents `p_k / q_k` of a real number given by its partial quotients.
pub fn convergents(x: &Quad) -> impl Iterator<Item = (BigInt, BigInt)> {
    let mut prev = (BigInt::one(), BigInt::zero());
    let mut prev2 = (BigInt::zero(), BigInt::one());
    x.continued_fraction().map(move |a| {
        let p = &a * &prev.0 + &prev2.0;
        let q = &a * &prev.1 + &prev2.1;
        prev2 = std::mem::replace(&mut prev, (p.clone(), q.clone()));
        (p, q)
    })
}

impl PartialEq for Quad {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.d == other.d)
    }
}

impl Eq for Quad {}

impl Hash for Quad {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        if !self.b.is_zero() {
            self.d.hash(state);
        }
    }
}

impl PartialOrd for Quad {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Quad {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self - other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl Neg for Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Neg for &Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        -self.clone()
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&Quad> for &Quad {
            type Output = Quad;
            fn $method(self, rhs: &Quad) -> Quad {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<Quad> for Quad {
            type Output = Quad;
            fn $method(self, rhs: Quad) -> Quad {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Quad> for Quad {
            type Output = Quad;
            fn $method(self, rhs: &Quad) -> Quad {
                (&self).$method(rhs)
            }
        }
        impl $trait<Quad> for &Quad {
            type Output = Quad;
            fn $method(self, rhs: Quad) -> Quad {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl AddAssign<&Quad> for Quad {
    fn add_assign(&mut self, rhs: &Quad) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Quad> for Quad {
    fn sub_assign(&mut self, rhs: &Quad) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Quad> for Quad {
    fn mul_assign(&mut self, rhs: &Quad) {
        *self = &*self * rhs;
    }
}

impl From<i64> for Quad {
    fn from(n: i64) -> Quad {
        Quad::from_int(n)
    }
}

impl From<Rational> for Quad {
    fn from(r: Rational) -> Quad {
        Quad::rational(r)
    }
}

impl std::iter::Sum for Quad {
    fn sum<I: Iterator<Item = Quad>>(iter: I) -> Quad {
        iter.fold(Quad::zero(), |acc, x| acc + x)
    }
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Canonical form: `p/q`, `r/s*sqrt(d)`, or `p/q + r/s*sqrt(d)`; unit
/// coefficients on the surd are dropped. The alternate flag (`{:#}`) omits
/// all spaces, which is the form used inside problem files.
impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let compact = f.alternate();
        if self.b.is_zero() {
            return fmt_rational(&self.a, f);
        }
        let mag = self.b.abs();
        let neg = self.b.is_negative();
        if !self.a.is_zero() {
            fmt_rational(&self.a, f)?;
            let op = if neg { '-' } else { '+' };
            if compact {
                write!(f, "{op}")?;
            } else {
                write!(f, " {op} ")?;
            }
        } else if neg {
            write!(f, "-")?;
        }
        if !mag.is_one() {
            fmt_rational(&mag, f)?;
            write!(f, "*")?;
        }
        write!(f, "sqrt({})", self.d)
    }
}

impl FromStr for Quad {
    type Err = Error;

    /// Parses `p/q`, `r/s*sqrt(d)` or sums of such terms; a literal with no
    /// surd term gets the default surd.
    fn from_str(s: &str) -> Result<Quad, Error> {
        parse_literal(s, None)
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse { line: 0, column: self.pos + 1, message: format!("{msg} in `{}`", self.src) }
    }

    fn integer(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.src[start..self.pos].parse().expect("digits"))
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn sqrt_call(&mut self) -> Result<u32, Error> {
        if !self.eat('(') {
            return Err(self.err("expected `(` after sqrt"));
        }
        let d = self.integer().ok_or_else(|| self.err("expected integer under sqrt"))?;
        if !self.eat(')') {
            return Err(self.err("expected `)`"));
        }
        let d = d.to_u32().filter(|&d| is_square_free(d as u64)).ok_or_else(|| self.err("surd must be a square-free integer ≥ 2"))?;
        Ok(d)
    }
}

fn parse_literal(src: &str, expect: Option<u32>) -> Result<Quad, Error> {
    let mut cur = Cursor { src, pos: 0 };
    let mut a = Rational::zero();
    let mut b = Rational::zero();
    let mut surd: Option<u32> = None;
    let mut first = true;
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            if first {
                return Err(cur.err("empty literal"));
            }
            break;
        }
        let mut sign = Rational::one();
        if cur.eat('-') {
            sign = -sign;
        } else if !cur.eat('+') && !first {
            return Err(cur.err("expected `+` or `-`"));
        }
        first = false;
        let coef = match cur.integer() {
            Some(p) => {
                let q = if cur.eat('/') { cur.integer().ok_or_else(|| cur.err("expected denominator"))? } else { BigInt::one() };
                if q.is_zero() {
                    return Err(cur.err("zero denominator"));
                }
                Some(Rational::new(p, q))
            }
            None => None,
        };
        let has_star = coef.is_some() && cur.eat('*');
        if has_star || (coef.is_none() && cur.keyword("sqrt")) {
            if has_star && !cur.keyword("sqrt") {
                return Err(cur.err("expected sqrt after `*`"));
            }
            let d = cur.sqrt_call()?;
            if let Some(prev) = surd {
                if prev != d {
                    return Err(cur.err("mixed surds in one literal"));
                }
            }
            if let Some(e) = expect {
                if e != d {
                    return Err(cur.err(&format!("surd sqrt({d}) does not match declared surd {e}")));
                }
            }
            surd = Some(d);
            b += sign * coef.unwrap_or_else(Rational::one);
        } else {
            let c = coef.ok_or_else(|| cur.err("expected a number or sqrt(d)"))?;
            a += sign * c;
        }
    }
    let d = surd.or(expect).unwrap_or(DEFAULT_SURD);
    Quad::try_new(a, b, d)
}
