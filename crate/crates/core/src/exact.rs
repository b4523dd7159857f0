//! Exact rational numbers.
//!
//! Every length, volume, value and coordinate in the crate is a [`Rational`].
//! Stack heights compose as `v / (l * W)` and denominators grow along deep
//! layers, so values that outgrow 64-bit numerators or denominators move to
//! arbitrary precision. Smaller values stay inline and are computed with
//! 128-bit intermediates.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// An exact fraction in lowest terms with a positive denominator.
#[derive(Clone)]
pub struct Rational(Repr);

/// `Small` whenever numerator and denominator fit in `i64` (numerator above
/// `i64::MIN`), `Big` otherwise, so equal values share one representation.
#[derive(Clone, PartialEq, Eq)]
enum Repr {
    Small { n: i64, d: i64 },
    Big(BigRational),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseFractionError {
    #[error("malformed fraction `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

fn fits(x: i128) -> Option<i64> {
    i64::try_from(x).ok().filter(|&v| v != i64::MIN)
}

/// Reduces `n / d` with `d > 0`.
fn from_i128(n: i128, d: i128) -> Rational {
    debug_assert!(d > 0);
    let g = n.gcd(&d);
    let (n, d) = if g > 1 { (n / g, d / g) } else { (n, d) };
    match (fits(n), fits(d)) {
        (Some(n), Some(d)) => Rational(Repr::Small { n, d }),
        _ => Rational(Repr::Big(BigRational::new_raw(
            BigInt::from(n),
            BigInt::from(d),
        ))),
    }
}

fn from_big(x: BigRational) -> Rational {
    if let (Some(n), Some(d)) = (x.numer().to_i64(), x.denom().to_i64()) {
        if n != i64::MIN {
            return Rational(Repr::Small { n, d });
        }
    }
    Rational(Repr::Big(x))
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small { n: 0, d: 1 })
    }

    pub fn one() -> Self {
        Rational(Repr::Small { n: 1, d: 1 })
    }

    pub fn from_integer(n: i64) -> Self {
        from_i128(n as i128, 1)
    }

    /// `num / den`, reduced. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        let (n, d) = (num as i128, den as i128);
        if d < 0 {
            from_i128(-n, -d)
        } else {
            from_i128(n, d)
        }
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "rational with zero denominator");
        from_big(BigRational::new(num, den))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { n, d } => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(x) => x.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { n, .. } => BigInt::from(*n),
            Repr::Big(x) => x.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { d, .. } => BigInt::from(*d),
            Repr::Big(x) => x.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { n: 0, .. })
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { d, .. } => *d == 1,
            Repr::Big(x) => x.is_integer(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small { n, .. } => *n > 0,
            Repr::Big(x) => x.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small { n, .. } => *n < 0,
            Repr::Big(x) => x.is_negative(),
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational::one() / self
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Self) -> Self {
        std::cmp::max(self, other)
    }

    /// Parses `[-]digits` or `[-]digits/digits`.
    pub fn parse_fraction(text: &str) -> Result<Self, ParseFractionError> {
        let malformed = || ParseFractionError::Malformed(text.to_string());
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (text, None),
        };
        let num = parse_signed_digits(num).ok_or_else(malformed)?;
        let den = match den {
            Some(d) => {
                if !is_digits(d) {
                    return Err(malformed());
                }
                d.parse::<BigInt>().map_err(|_| malformed())?
            }
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(ParseFractionError::ZeroDenominator(text.to_string()));
        }
        Ok(from_big(BigRational::new(num, den)))
    }

    /// Integer shorthand when the denominator is 1, `n/d` otherwise.
    pub fn format_fraction(&self) -> String {
        match &self.0 {
            Repr::Small { n, d: 1 } => n.to_string(),
            Repr::Small { n, d } => format!("{n}/{d}"),
            Repr::Big(x) if x.denom().is_one() => x.numer().to_string(),
            Repr::Big(x) => format!("{}/{}", x.numer(), x.denom()),
        }
    }

    /// Decimal rendering with `places` digits after the point, rounded half to even.
    pub fn to_decimal(&self, places: u32) -> String {
        let x = self.to_big();
        let scale = BigInt::from(10u32).pow(places);
        let scaled = x.numer() * &scale;
        let den = x.denom();
        let (mut q, r) = scaled.div_mod_floor(den);
        // r in [0, den): compare 2r with den for rounding
        let twice: BigInt = &r * BigInt::from(2u8);
        match twice.cmp(den) {
            Ordering::Greater => q += 1,
            Ordering::Equal if q.is_odd() => q += 1,
            _ => {}
        }
        let negative = q.is_negative();
        let digits = q.abs().to_string();
        let places = places as usize;
        let digits = if digits.len() <= places {
            format!("{}{}", "0".repeat(places + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int_part, frac_part) = digits.split_at(digits.len() - places);
        let sign = if negative { "-" } else { "" };
        if places == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }

    /// Lossy conversion for reporting only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { n, d } => *n as f64 / *d as f64,
            Repr::Big(x) => x.to_f64().unwrap_or(f64::NAN),
        }
    }
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn parse_signed_digits(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix('-').unwrap_or(s);
    if !is_digits(body) {
        return None;
    }
    let n: BigInt = body.parse().ok()?;
    Some(if s.starts_with('-') { -n } else { n })
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small { n, d } => {
                BigInt::from(*n).hash(state);
                BigInt::from(*d).hash(state);
            }
            Repr::Big(x) => {
                x.numer().hash(state);
                x.denom().hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { n: a, d: b }, Repr::Small { n: c, d }) => {
                if b == d {
                    a.cmp(c)
                } else {
                    (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
                }
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for Rational {
    type Err = ParseFractionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rational::parse_fraction(s)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_fraction())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_fraction())
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.format_fraction())
    }
}

impl<'de> serde::Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Rational::parse_fraction(&s).map_err(serde::de::Error::custom)
    }
}

fn add(x: &Rational, y: &Rational) -> Rational {
    match (&x.0, &y.0) {
        (Repr::Small { n: a, d: b }, Repr::Small { n: c, d }) => {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if b == d {
                from_i128(a + c, b)
            } else {
                from_i128(a * d + c * b, b * d)
            }
        }
        _ => from_big(x.to_big() + y.to_big()),
    }
}

fn sub(x: &Rational, y: &Rational) -> Rational {
    add(x, &-y)
}

fn mul(x: &Rational, y: &Rational) -> Rational {
    match (&x.0, &y.0) {
        (Repr::Small { n: a, d: b }, Repr::Small { n: c, d }) => {
            from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
        }
        _ => from_big(x.to_big() * y.to_big()),
    }
}

fn div(x: &Rational, y: &Rational) -> Rational {
    assert!(!y.is_zero(), "division by zero");
    match (&x.0, &y.0) {
        (Repr::Small { n: a, d: b }, Repr::Small { n: c, d }) => {
            let (n, m) = (*a as i128 * *d as i128, *b as i128 * *c as i128);
            if m < 0 {
                from_i128(-n, -m)
            } else {
                from_i128(n, m)
            }
        }
        _ => from_big(x.to_big() / y.to_big()),
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $f:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $f(self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $f(&self, &rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $f(&self, rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $f(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);
forward_binop!(Div, div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = add(self, rhs);
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = add(self, &rhs);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = sub(self, rhs);
    }
}

impl SubAssign<Rational> for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = sub(self, &rhs);
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            // the numerator is never i64::MIN, so this cannot overflow
            Repr::Small { n, d } => Rational(Repr::Small { n: -n, d: *d }),
            Repr::Big(x) => from_big(-x),
        }
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}
