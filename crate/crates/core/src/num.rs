//! Exact scalar types: rationals, extended values with explicit infinities,
//! and signed square roots of rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact money amounts and probabilities.
pub type Rational = BigRational;

/// `numer / denom` as a [`Rational`]. Panics on a zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn pow2(exp: i32) -> Rational {
    let base = Rational::from_integer(BigInt::from(2));
    if exp >= 0 {
        num_traits::pow(base, exp as usize)
    } else {
        num_traits::pow(base, (-exp) as usize).recip()
    }
}

pub fn ceil_to_integer(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// A value that may be `-inf` or `+inf`.
///
/// The derived order puts `NegInf` below every finite value and `PosInf`
/// above.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T> Extended<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn into_finite(self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::NegInf => Extended::NegInf,
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::PosInf => Extended::PosInf,
        }
    }
}

impl<T: Scalar> Extended<T> {
    pub fn is_negative(&self) -> bool {
        match self {
            Extended::NegInf => true,
            Extended::Finite(v) => v.lt_zero(),
            Extended::PosInf => false,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Extended::NegInf => false,
            Extended::Finite(v) => !v.lt_zero() && !v.eq_zero(),
            Extended::PosInf => true,
        }
    }

    /// `self <= 0` under the extended order.
    pub fn is_nonpositive(&self) -> bool {
        !self.is_positive()
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.is_negative()
    }
}

impl<T: Neg<Output = T>> Neg for Extended<T> {
    type Output = Extended<T>;

    fn neg(self) -> Self::Output {
        match self {
            Extended::NegInf => Extended::PosInf,
            Extended::Finite(v) => Extended::Finite(-v),
            Extended::PosInf => Extended::NegInf,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => f.write_str("-inf"),
            Extended::Finite(v) => v.fmt(f),
            Extended::PosInf => f.write_str("inf"),
        }
    }
}

impl From<Rational> for Extended<Rational> {
    fn from(value: Rational) -> Self {
        Extended::Finite(value)
    }
}

/// Ordered exact scalars that quantile functions can return.
pub trait Scalar: Clone + Ord + fmt::Debug + fmt::Display + Neg<Output = Self> + Send + Sync {
    fn from_rational(value: &Rational) -> Self;
    fn lt_zero(&self) -> bool;
    fn eq_zero(&self) -> bool;
    /// Multiply by a rational factor of any sign.
    fn scale(&self, factor: &Rational) -> Self;
    /// A positive rational `r` with `r <= |self|`; `None` when `self` is zero.
    fn magnitude_lower_bound(&self) -> Option<Rational>;
    /// The exact rational value when there is one.
    fn to_rational(&self) -> Option<Rational>;
    fn to_f64(&self) -> f64;
}

impl Scalar for Rational {
    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }

    fn lt_zero(&self) -> bool {
        Signed::is_negative(self)
    }

    fn eq_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn scale(&self, factor: &Rational) -> Self {
        self * factor
    }

    fn magnitude_lower_bound(&self) -> Option<Rational> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.abs())
        }
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// The exact real number `±sqrt(square)` with `square` rational.
///
/// Every rational `q` is the surd `sign(q) * sqrt(q^2)`, and the family is
/// closed under negation and rational scaling, which is all the quantile
/// shapes with a square-root piece need.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    negative: bool,
    square: Rational,
}

impl Surd {
    pub fn zero() -> Self {
        Surd { negative: false, square: Rational::zero() }
    }

    /// `sqrt(square)`; `square` must be nonnegative.
    pub fn sqrt(square: Rational) -> Self {
        assert!(!Signed::is_negative(&square), "square root of a negative rational");
        Surd { negative: false, square }
    }

    /// `-sqrt(square)`; `square` must be nonnegative.
    pub fn neg_sqrt(square: Rational) -> Self {
        assert!(!Signed::is_negative(&square), "square root of a negative rational");
        let negative = !Zero::is_zero(&square);
        Surd { negative, square }
    }

    pub fn square(&self) -> &Rational {
        &self.square
    }

    pub fn min_zero(&self) -> Self {
        if self.negative {
            self.clone()
        } else {
            Surd::zero()
        }
    }

    pub fn cmp_rational(&self, other: &Rational) -> Ordering {
        self.cmp(&Surd::from_rational(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.negative, other.negative) {
            (false, false) => self.square.cmp(&other.square),
            (true, true) => other.square.cmp(&self.square),
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for Surd {
    type Output = Surd;

    fn neg(self) -> Surd {
        if Zero::is_zero(&self.square) {
            self
        } else {
            Surd { negative: !self.negative, square: self.square }
        }
    }
}

impl Scalar for Surd {
    fn from_rational(value: &Rational) -> Self {
        Surd { negative: Signed::is_negative(value), square: value * value }
    }

    fn lt_zero(&self) -> bool {
        self.negative
    }

    fn eq_zero(&self) -> bool {
        Zero::is_zero(&self.square)
    }

    fn scale(&self, factor: &Rational) -> Self {
        if Zero::is_zero(factor) {
            return Surd::zero();
        }
        let scaled = Surd { negative: self.negative, square: &self.square * factor * factor };
        if Signed::is_negative(factor) {
            -scaled
        } else {
            scaled
        }
    }

    fn magnitude_lower_bound(&self) -> Option<Rational> {
        if Zero::is_zero(&self.square) {
            None
        } else {
            Some(sqrt_lower_bound(&self.square))
        }
    }

    fn to_rational(&self) -> Option<Rational> {
        let root = exact_sqrt(&self.square)?;
        Some(if self.negative { -root } else { root })
    }

    fn to_f64(&self) -> f64 {
        let magnitude = ToPrimitive::to_f64(&self.square).unwrap_or(f64::NAN).sqrt();
        if self.negative {
            -magnitude
        } else {
            magnitude
        }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_rational() {
            Some(r) => write!(f, "{r}"),
            None if self.negative => write!(f, "-sqrt({})", self.square),
            None => write!(f, "sqrt({})", self.square),
        }
    }
}

fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if Signed::is_negative(r) {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// A positive rational no larger than `sqrt(r)`, for `r > 0`.
pub fn sqrt_lower_bound(r: &Rational) -> Rational {
    debug_assert!(Signed::is_positive(r));
    if let Some(root) = exact_sqrt(r) {
        return root;
    }
    // sqrt(p/q) = sqrt(p q) / q; scale by 4^k until the integer root is nonzero.
    let pq = r.numer() * r.denom();
    let mut shift = 0u32;
    loop {
        let scaled = &pq << (2 * shift as usize);
        let root = scaled.sqrt();
        if !Zero::is_zero(&root) {
            let denom = r.denom() << shift as usize;
            return Rational::new(root, denom);
        }
        shift += 1;
    }
}

/// Parse `"-12.5"`, `"3/4"`, `"7"` or `"1.5e-3"` without going through
/// binary floating point.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim()).ok_or_else(bad)?;
        let den = parse_decimal(den.trim()).ok_or_else(bad)?;
        if Zero::is_zero(&den) {
            return Err(bad());
        }
        return Ok(num / den);
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: String = [whole, frac].concat();
    let numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    let scale = exponent - frac.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let factor =
        if scale >= 0 { num_traits::pow(ten, scale as usize) } else { num_traits::pow(ten, (-scale) as usize).recip() };
    let value = Rational::from_integer(numer) * factor;
    Some(if negative { -value } else { value })
}

/// Render with `digits` significant digits, rounding half away from zero.
pub fn format_decimal(value: &Rational, digits: usize) -> String {
    if Zero::is_zero(value) {
        return "0".to_string();
    }
    let sign = if Signed::is_negative(value) { "-" } else { "" };
    let magnitude = value.abs();
    let ten = BigInt::from(10);

    // 10^exp <= magnitude < 10^(exp+1)
    let mut exp = magnitude.numer().to_string().len() as i64 - magnitude.denom().to_string().len() as i64;
    let power = |e: i64| -> Rational {
        let p = Rational::from_integer(num_traits::pow(ten.clone(), e.unsigned_abs() as usize));
        if e >= 0 {
            p
        } else {
            p.recip()
        }
    };
    while magnitude < power(exp) {
        exp -= 1;
    }
    while magnitude >= power(exp + 1) {
        exp += 1;
    }
    let shift = digits as i64 - 1 - exp;
    let scaled = &magnitude * power(shift);
    let mut mantissa = round_half_away(&scaled);
    if mantissa.to_string().len() > digits {
        mantissa /= &ten;
        exp += 1;
    }
    let text = mantissa.to_string();
    if (-5..digits as i64).contains(&exp) {
        let point = exp + 1;
        let body = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), text)
        } else if point as usize >= text.len() {
            format!("{}{}", text, "0".repeat(point as usize - text.len()))
        } else {
            format!("{}.{}", &text[..point as usize], &text[point as usize..])
        };
        format!("{sign}{}", trim_fraction(&body))
    } else {
        let body = trim_fraction(&format!("{}.{}", &text[..1], &text[1..]));
        format!("{sign}{body}e{exp}")
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn round_half_away(r: &Rational) -> BigInt {
    let (q, rem) = r.numer().div_rem(r.denom());
    let twice = &rem * BigInt::from(2);
    if twice.abs() >= r.denom().abs() {
        if twice.sign() == Sign::Minus {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

pub fn is_unit_interval(r: &Rational) -> bool {
    !Signed::is_negative(r) && *r <= Rational::one()
}

pub fn check_level(level: &Rational) -> Result<()> {
    if is_unit_interval(level) {
        Ok(())
    } else {
        Err(Error::LevelOutOfRange(level.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_order_puts_infinities_at_the_ends() {
        let lo: Extended<Rational> = Extended::NegInf;
        let hi: Extended<Rational> = Extended::PosInf;
        let mid = Extended::Finite(int(-1000));
        assert!(lo < mid && mid < hi);
        assert_eq!(-lo.clone(), hi);
        assert!(lo.is_nonpositive() && hi.is_positive());
    }

    #[test]
    fn surd_ordering_matches_reals() {
        let a = Surd::neg_sqrt(int(2)); // -1.414
        let b = Surd::from_rational(&rat(-3, 2));
        let c = Surd::from_rational(&int(1));
        let d = Surd::sqrt(int(2));
        assert!(b < a && a < Surd::zero() && Surd::zero() < c && c < d);
        assert_eq!(a.scale(&int(2)), Surd::neg_sqrt(int(8)));
        assert_eq!(a.scale(&int(-1)), d);
        assert_eq!(Surd::sqrt(rat(9, 4)).to_rational(), Some(rat(3, 2)));
        assert_eq!(Surd::neg_sqrt(int(2)).to_rational(), None);
    }

    #[test]
    fn sqrt_lower_bound_is_below_the_root() {
        for r in [rat(1, 3), rat(2, 1), rat(1, 1_000_000_007), pow2(-82)] {
            let lb = sqrt_lower_bound(&r);
            assert!(Signed::is_positive(&lb));
            assert!(&lb * &lb <= r);
        }
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(
            parse_rational("0.123456789012345678").unwrap(),
            Rational::new(BigInt::from(123456789012345678i64), BigInt::from(10).pow(18))
        );
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("-").is_err());
    }

    #[test]
    fn twelve_digit_rendering() {
        assert_eq!(format_decimal(&rat(1, 3), 12), "0.333333333333");
        assert_eq!(format_decimal(&rat(2, 3), 12), "0.666666666667");
        assert_eq!(format_decimal(&int(-1), 12), "-1");
        assert_eq!(format_decimal(&rat(7, 32), 12), "0.21875");
        assert_eq!(format_decimal(&int(0), 12), "0");
        assert_eq!(format_decimal(&int(105), 12), "105");
        assert_eq!(format_decimal(&rat(1, 10_000_000), 12), "1e-7");
        assert_eq!(format_decimal(&rat(9_999_999_999_999, 10), 12), "1e12");
    }
}
