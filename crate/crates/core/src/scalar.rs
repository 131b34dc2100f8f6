//! Numeric backends.
//!
//! Every algorithm in the crate is generic over [`Scalar`], which is
//! implemented for `f64` and for [`Rational`] (an exact arbitrary precision
//! ratio). Exact arithmetic is what the reductions and the oracle tests rely
//! on; `f64` is the fast path for large brute-force sweeps.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Exact arbitrary precision rational number.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    /// Whether arithmetic in this backend is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact rational value of `self` (for `f64` this is the binary value).
    fn to_rational(&self) -> Rational;
    /// `floor(self / m) * m`.
    fn floor_to_multiple(&self, m: &Self) -> Self;
    fn sqrt_approx(&self) -> Self;

    fn powi(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc *= &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }

    /// Total order; `f64` values in this crate are never NaN.
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).unwrap_or_else(<Rational as Zero>::zero)
    }
    fn floor_to_multiple(&self, m: &Self) -> Self {
        (self / m).floor() * m
    }
    fn sqrt_approx(&self) -> Self {
        self.sqrt()
    }
    fn powi(&self, exp: u32) -> Self {
        f64::powi(*self, exp as i32)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn floor_to_multiple(&self, m: &Self) -> Self {
        (self / m).floor() * m
    }
    fn sqrt_approx(&self) -> Self {
        Rational::from_float(rational_to_f64(self).sqrt()).unwrap_or_else(<Rational as Zero>::zero)
    }
}

/// Converts a rational to the nearest-ish `f64` even when numerator and
/// denominator overflow `f64` individually.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb.max(db) - 900;
    let scale = |v: &BigInt| -> f64 {
        if shift > 0 {
            (v >> (shift as usize)).to_f64().unwrap_or(0.0)
        } else {
            v.to_f64().unwrap_or(0.0)
        }
    };
    scale(r.numer()) / scale(r.denom())
}

/// Parses `"a/b"`, an integer, or a decimal such as `"0.125"` / `"-3.5e-2"`
/// into an exact rational. Decimals convert exactly (power-of-ten
/// denominators).
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let s = text.trim();
    let bad = || Error::Input(format!("not a number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Input(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
    if neg {
        value = -value;
    }
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 10_000 {
        return Err(Error::Input(format!("exponent out of range in {text:?}")));
    }
    let ten = BigInt::from(10u32);
    let r = if scale >= 0 {
        Rational::from_integer(value * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(value, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

/// Canonical text form: `"n"` for integers, `"a/b"` in lowest terms otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders `r` as a decimal with `digits` significant digits.
pub fn format_decimal(r: &Rational, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    // find exponent e with 10^e <= a < 10^(e+1)
    let mut e: i64 = (rational_to_f64(&a).abs().log10().floor()) as i64;
    let pow = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(num_traits::pow(BigInt::from(10), e as usize))
        } else {
            Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), (-e) as usize))
        }
    };
    while pow(e) > a {
        e -= 1;
    }
    while pow(e + 1) <= a {
        e += 1;
    }
    let shift = digits as i64 - 1 - e;
    let scaled = &a * pow(shift);
    // round half away from zero
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut m = (scaled + half).floor().to_integer();
    let mut shift = shift;
    if m >= num_traits::pow(BigInt::from(10), digits) {
        m = m.div_floor(&BigInt::from(10));
        shift -= 1;
    }
    let mut s = m.to_string();
    let out = if shift <= 0 {
        s.push_str(&"0".repeat((-shift) as usize));
        s
    } else {
        let shift = shift as usize;
        if s.len() <= shift {
            let zeros = "0".repeat(shift - s.len());
            s = format!("0.{zeros}{s}");
        } else {
            s.insert(s.len() - shift, '.');
        }
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    };
    if neg {
        format!("-{out}")
    } else {
        out
    }
}

/// Relative comparison used for the float backend: `|a-b| <= tol * max(1, |a|, |b|)`.
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// Compares two scalars, exactly for exact backends and with relative
/// tolerance `1e-9` for floats.
pub fn scalar_eq<T: Scalar>(a: &T, b: &T) -> bool {
    if T::EXACT {
        a == b
    } else {
        approx_eq(a.to_f64(), b.to_f64(), 1e-9)
    }
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-3.5e-2").unwrap(), rat(-7, 200));
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert_eq!(parse_rational(".25").unwrap(), rat(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats() {
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_decimal(&rat(227, 2), 12), "113.5");
        assert_eq!(format_decimal(&rat(1, 3), 12), "0.333333333333");
        assert_eq!(format_decimal(&rat(2, 3), 12), "0.666666666667");
        assert_eq!(format_decimal(&rat(-1, 8), 12), "-0.125");
        assert_eq!(format_decimal(&rat(1, 1000), 3), "0.001");
        assert_eq!(format_decimal(&rat(123456, 1), 3), "123000");
    }

    #[test]
    fn floor_to_multiple_matches_definition() {
        let m = rat(1, 1);
        assert_eq!(rat(37, 10).floor_to_multiple(&m), rat(3, 1));
        assert_eq!(3.7f64.floor_to_multiple(&1.0), 3.0);
        assert_eq!(rat(7, 10).floor_to_multiple(&rat(1, 4)), rat(1, 2));
    }

    #[test]
    fn powi_and_huge_conversion() {
        assert_eq!(rat(1, 2).powi(3), rat(1, 8));
        assert_eq!(Scalar::powi(&rat(3, 1), 0), rat(1, 1));
        let tiny = rat(1, 3).powi(2000) / rat(1, 3).powi(1999);
        assert!((rational_to_f64(&tiny) - 1.0 / 3.0).abs() < 1e-12);
    }
}
