//! Exact rational arithmetic.
//!
//! [`Rational`] wraps an arbitrary-precision `p/q` kept in lowest terms with a
//! positive denominator, so equality is structural and no comparison, floor or
//! ceiling ever rounds.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational number in canonical reduced form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num/den`, reducing to lowest terms. Fails when `den == 0`.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always strictly positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Greatest integer `<= self`.
    pub fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    /// Least integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        self.numer().div_ceil(self.denom())
    }

    /// `self - floor(self)`, always in `[0, 1)`.
    pub fn fract(&self) -> Rational {
        Rational(BigRational::new(
            self.numer().mod_floor(self.denom()),
            self.denom().clone(),
        ))
    }

    /// Floor of `self * 2^shift / n` without building the intermediate rational.
    pub fn floor_scaled(&self, shift: usize, n: &BigInt) -> BigInt {
        (self.numer() << shift).div_floor(&(self.denom() * n))
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Positional decimal with `sig` significant digits, rounded half-to-even.
    /// Trailing fractional zeros are dropped; zero prints as `"0"`.
    pub fn to_decimal(&self, sig: usize) -> String {
        assert!(sig >= 1, "need at least one significant digit");
        if self.is_zero() {
            return "0".to_string();
        }
        let negative = self.is_negative();
        let mag = self.0.abs();
        let num = mag.numer().magnitude().clone();
        let den = mag.denom().magnitude().clone();

        // exponent e with 10^e <= mag < 10^(e+1)
        let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
        if cmp_scaled(&num, &den, e) == Ordering::Less {
            e -= 1;
        }
        // digits = round(mag * 10^(sig-1-e)), then renormalize if rounding carried
        let mut shift = sig as i64 - 1 - e;
        let mut digits = round_half_even_scaled(&num, &den, shift);
        if digits.to_string().len() > sig {
            shift -= 1;
            digits = round_half_even_scaled(&num, &den, shift);
        }

        let mut text = digits.to_string();
        let body = if shift <= 0 {
            text.extend(std::iter::repeat_n('0', (-shift) as usize));
            text
        } else {
            let shift = shift as usize;
            if text.len() <= shift {
                let pad = "0".repeat(shift - text.len());
                text = format!("0.{pad}{text}");
            } else {
                text.insert(text.len() - shift, '.');
            }
            let trimmed = text.trim_end_matches('0').trim_end_matches('.');
            trimmed.to_string()
        };
        if negative {
            format!("-{body}")
        } else {
            body
        }
    }
}

/// Compares `num/den` with `10^e`.
fn cmp_scaled(num: &BigUint, den: &BigUint, e: i64) -> Ordering {
    let p = BigUint::from(10u32).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        num.cmp(&(den * p))
    } else {
        (num * p).cmp(den)
    }
}

/// `round(num/den * 10^shift)` with ties to even.
fn round_half_even_scaled(num: &BigUint, den: &BigUint, shift: i64) -> BigUint {
    let p = BigUint::from(10u32).pow(shift.unsigned_abs() as u32);
    let (n, d) = if shift >= 0 {
        (num * p, den.clone())
    } else {
        (num.clone(), den * p)
    };
    let (q, r) = n.div_rem(&d);
    match (r << 1u32).cmp(&d) {
        Ordering::Less => q,
        Ordering::Greater => q + 1u32,
        Ordering::Equal if q.is_even() => q,
        Ordering::Equal => q + 1u32,
    }
}

/// `‖x − y‖`: the distance from `x − y` to the nearest integer.
///
/// Both inputs must lie in `[0, 1)`; the result lies in `[0, 1/2]`.
pub fn circle_distance(x: &Rational, y: &Rational) -> Result<Rational> {
    for v in [x, y] {
        if v.is_negative() || v.0 >= BigRational::one() {
            return Err(Error::Domain(format!("{v} is outside [0, 1)")));
        }
    }
    Ok(circle_distance_unit(x, y))
}

/// [`circle_distance`] without the range check; callers guarantee `x, y ∈ [0, 1)`.
pub(crate) fn circle_distance_unit(x: &Rational, y: &Rational) -> Rational {
    let d = (&x.0 - &y.0).abs();
    let wrap = BigRational::one() - &d;
    Rational(if wrap < d { wrap } else { d })
}

/// `‖x − y‖ <= t` for `x, y ∈ [0, 1)` and `t >= 0`. Uses 256-bit cross
/// multiplication when the points have 64-bit parts and `t` has 128-bit parts.
pub(crate) fn circle_distance_at_most(x: &Rational, y: &Rational, t: &Rational) -> bool {
    if let (Some((a, b)), Some((c, d)), Some((p, q))) = (x.parts_u64(), y.parts_u64(), t.parts_u128()) {
        let den = b * d;
        let diff = (a * d).abs_diff(c * b);
        let dist = diff.min(den - diff);
        return mul_wide(dist, q) <= mul_wide(p, den);
    }
    circle_distance_unit(x, y) <= *t
}

/// Full 256-bit product as `(high, low)`; tuple order makes `<=` compare the value.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a_hi, a_lo) = (a >> 64, a & MASK);
    let (b_hi, b_lo) = (b >> 64, b & MASK);
    let lo_lo = a_lo * b_lo;
    let hi_lo = a_hi * b_lo;
    let lo_hi = a_lo * b_hi;
    let hi_hi = a_hi * b_hi;
    let mid = (lo_lo >> 64) + (hi_lo & MASK) + (lo_hi & MASK);
    let low = (mid << 64) | (lo_lo & MASK);
    let high = hi_hi + (hi_lo >> 64) + (lo_hi >> 64) + (mid >> 64);
    (high, low)
}

impl Rational {
    fn parts_u64(&self) -> Option<(u128, u128)> {
        Some((self.numer().to_u64()? as u128, self.denom().to_u64()? as u128))
    }

    fn parts_u128(&self) -> Option<(u128, u128)> {
        Some((self.numer().to_u128()?, self.denom().to_u128()?))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as an exact rational: {reason}")]
pub struct ParseRationalError {
    input: String,
    reason: &'static str,
}

impl ParseRationalError {
    fn new(input: &str, reason: &'static str) -> Self {
        ParseRationalError {
            input: input.to_string(),
            reason,
        }
    }
}

fn parse_integer(s: &str, whole: &str) -> std::result::Result<BigInt, ParseRationalError> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::new(whole, "expected decimal digits"));
    }
    s.parse::<BigInt>()
        .map_err(|_| ParseRationalError::new(whole, "expected decimal digits"))
}

/// Accepts `p`, `p/q` and exact decimal literals such as `-1.25`.
impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(input: &str) -> std::result::Result<Self, Self::Err> {
        let s = input.trim();
        if s.is_empty() {
            return Err(ParseRationalError::new(input, "empty value"));
        }
        if let Some((p, q)) = s.split_once('/') {
            let num = parse_integer(p.trim(), input)?;
            let den = parse_integer(q.trim(), input)?;
            if den.is_zero() {
                return Err(ParseRationalError::new(input, "zero denominator"));
            }
            return Ok(Rational(BigRational::new(num, den)));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let (sign, int_digits) = match int_part.as_bytes().first() {
                Some(b'-') => (Sign::Minus, &int_part[1..]),
                Some(b'+') => (Sign::Plus, &int_part[1..]),
                _ => (Sign::Plus, int_part),
            };
            if int_digits.is_empty() && frac_part.is_empty() {
                return Err(ParseRationalError::new(input, "no digits"));
            }
            let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
            if !all_digits(int_digits) || !all_digits(frac_part) {
                return Err(ParseRationalError::new(input, "expected decimal digits"));
            }
            let joined = format!("{int_digits}{frac_part}");
            let mag: BigUint = joined
                .parse()
                .map_err(|_| ParseRationalError::new(input, "bad digits"))?;
            let den = BigInt::from(10u32).pow(frac_part.len() as u32);
            return Ok(Rational(BigRational::new(BigInt::from_biguint(sign, mag), den)));
        }
        Ok(Rational::from_integer(parse_integer(s, input)?))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }

        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for &Rational {
    type Output = Rational;

    /// Panics on division by zero.
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(&self.0 / &rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;

    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn floor_examples() {
        assert_eq!(r("0").floor(), BigInt::from(0));
        assert_eq!(r("7/2").floor(), BigInt::from(3));
        assert_eq!(r("-1/2").floor(), BigInt::from(-1));
    }

    #[test]
    fn ceil_examples() {
        assert_eq!(r("1/2").ceil(), BigInt::from(1));
        assert_eq!(r("3").ceil(), BigInt::from(3));
        assert_eq!(r("-1/2").ceil(), BigInt::from(0));
    }

    #[test]
    fn circle_distance_examples() {
        assert_eq!(circle_distance(&r("0"), &r("1/2")).unwrap(), r("1/2"));
        assert_eq!(circle_distance(&r("1/8"), &r("7/8")).unwrap(), r("1/4"));
        assert_eq!(circle_distance(&r("3/7"), &r("3/7")).unwrap(), r("0"));
    }

    #[test]
    fn circle_distance_rejects_out_of_range() {
        assert!(circle_distance(&r("1"), &r("0")).is_err());
        assert!(circle_distance(&r("0"), &r("-1/3")).is_err());
    }

    #[test]
    fn canonical_form() {
        let x = Rational::new(6, -4).unwrap();
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(x, r("-3/2"));
        assert!(Rational::new(1, 0).is_err());
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(r("1.3"), Rational::new(13, 10).unwrap());
        assert_eq!(r("-0.25").to_string(), "-1/4");
        assert_eq!(r(".5").to_string(), "1/2");
        assert_eq!(r("4/2").to_string(), "2");
        assert_eq!(r(" 13/10 ").to_string(), "13/10");
        for bad in ["", "abc", "NaN", "inf", "-inf", "1/0", "1.2.3", "1e5", "1/-", "."] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(r("4/3").to_decimal(12), "1.33333333333");
        assert_eq!(r("2/3").to_decimal(12), "0.666666666667");
        assert_eq!(r("2").to_decimal(12), "2");
        assert_eq!(r("0").to_decimal(12), "0");
        assert_eq!(r("1/8").to_decimal(12), "0.125");
        assert_eq!(r("-1/3").to_decimal(3), "-0.333");
        assert_eq!(r("1000000000").to_decimal(12), "1000000000");
        assert_eq!(r("123456789012345").to_decimal(12), "123456789012000");
        assert_eq!(r("1/4000").to_decimal(12), "0.00025");
        // ties round to even
        assert_eq!(r("0.125").to_decimal(2), "0.12");
        assert_eq!(r("0.135").to_decimal(2), "0.14");
        // carry into a new leading digit
        assert_eq!(r("9.996").to_decimal(3), "10");
        assert_eq!(r("0.9999").to_decimal(2), "1");
    }

    #[test]
    fn wide_product_matches_bigint() {
        let cases = [
            (0u128, 5u128),
            (u128::MAX, u128::MAX),
            (u128::MAX, 2),
            (1 << 64, 1 << 64),
            (12345678901234567890123, 98765432109876543210),
        ];
        for (a, b) in cases {
            let (hi, lo) = mul_wide(a, b);
            let expected = BigInt::from(a) * BigInt::from(b);
            assert_eq!((BigInt::from(hi) << 128) + BigInt::from(lo), expected, "{a} * {b}");
        }
    }

    #[test]
    fn threshold_comparison_fast_and_slow_paths_agree() {
        let t_small = r("1/3");
        let t_wide = Rational::new(BigInt::from(1u128 << 100) + 1, BigInt::from(3u128) << 100).unwrap();
        let t_huge = Rational::new(BigInt::from(1) << 200, (BigInt::from(3) << 200) + 1).unwrap();
        let points = [r("0"), r("1/3"), r("2/3"), r("999999/1000000"), r("1/4"), r("5/7")];
        for t in [&t_small, &t_wide, &t_huge, &r("0"), &r("1/2")] {
            for x in &points {
                for y in &points {
                    assert_eq!(
                        circle_distance_at_most(x, y, t),
                        circle_distance_unit(x, y) <= *t,
                        "{x} {y} {t}"
                    );
                }
            }
        }
    }

    #[test]
    fn fract_is_in_unit_interval() {
        assert_eq!(r("7/2").fract(), r("1/2"));
        assert_eq!(r("-1/4").fract(), r("3/4"));
        assert_eq!(r("3").fract(), r("0"));
    }
}
