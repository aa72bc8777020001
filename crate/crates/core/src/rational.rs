//! Exact rational arithmetic for densities, potentials and probabilities.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Self(BigRational::new(numer.into(), denom.into())))
    }

    pub fn from_integer(v: i64) -> Self {
        Self(BigRational::from_integer(v.into()))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Self(BigRational::new(numer, denom)))
    }

    /// Exact value of a finite float (every finite f64 is a dyadic rational).
    pub fn from_f64(v: f64) -> Result<Self> {
        BigRational::from_float(v)
            .map(Self)
            .ok_or_else(|| Error::Domain(format!("non-finite value {v}")))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

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

    pub fn recip(&self) -> Result<Self> {
        if self.0.is_zero() {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        Ok(Self(self.0.recip()))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = BigRational::one();
        for _ in 0..exp {
            acc *= &self.0;
        }
        Self(acc)
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for ExactRational {
    fn from(v: BigRational) -> Self {
        Self(v)
    }
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Accepts `P`, `P/Q` and plain decimals such as `0.25` or `-1.5`.
impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse { line: 1, msg: format!("{msg}: {s:?}") };
        let s = s.trim();
        if s.is_empty() {
            return Err(bad("empty rational"));
        }
        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = parse_int(num.trim()).ok_or_else(|| bad("bad numerator"))?;
            let den: BigInt = parse_int(den.trim()).ok_or_else(|| bad("bad denominator"))?;
            if den.is_zero() {
                return Err(bad("zero denominator"));
            }
            return Ok(Self(BigRational::new(num, den)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let (neg, int) = match int.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, int.strip_prefix('+').unwrap_or(int)),
            };
            let digits_ok = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
            if (int.is_empty() && frac.is_empty()) || !digits_ok(int) || !digits_ok(frac) {
                return Err(bad("bad decimal"));
            }
            if frac.len() > 64 {
                return Err(bad("too many fractional digits"));
            }
            let whole = format!("{int}{frac}");
            let mut num: BigInt = if whole.is_empty() { BigInt::zero() } else { whole.parse().map_err(|_| bad("bad decimal"))? };
            if neg {
                num = -num;
            }
            let den = num_traits::pow(BigInt::from(10u32), frac.len());
            return Ok(Self(BigRational::new(num, den)));
        }
        parse_int(s)
            .map(|n| Self(BigRational::from_integer(n)))
            .ok_or_else(|| bad("bad integer"))
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || digits.len() > 4096 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational($tr::$method(self.0, rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational($tr::$method(&self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

/// Compares `a/b` with `c/d` for positive `b`, `d` without building rationals.
pub(crate) fn cmp_fractions(a: i64, b: i64, c: i64, d: i64) -> Ordering {
    debug_assert!(b > 0 && d > 0);
    (a as i128 * d as i128).cmp(&(c as i128 * b as i128))
}

/// Binomial coefficient as an exact big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_decimal_and_integer() {
        assert_eq!("4/6".parse::<ExactRational>().unwrap(), ExactRational::new(2, 3).unwrap());
        assert_eq!("0.25".parse::<ExactRational>().unwrap(), ExactRational::new(1, 4).unwrap());
        assert_eq!("-3".parse::<ExactRational>().unwrap(), ExactRational::from_integer(-3));
        assert_eq!(".5".parse::<ExactRational>().unwrap(), ExactRational::new(1, 2).unwrap());
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!("abc".parse::<ExactRational>().is_err());
        assert!(".".parse::<ExactRational>().is_err());
        assert!("1/-".parse::<ExactRational>().is_err());
    }

    #[test]
    fn display_is_reduced() {
        assert_eq!(ExactRational::new(10, 4).unwrap().to_string(), "5/2");
        assert_eq!(ExactRational::new(4, 2).unwrap().to_string(), "2");
        assert_eq!(ExactRational::new(3, -9).unwrap().to_string(), "-1/3");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(200, 3), BigInt::from(1_313_400u64));
        assert_eq!(binomial(5, 7), BigInt::zero());
        assert_eq!(binomial(20, 4), BigInt::from(4845u32));
    }

    #[test]
    fn ceil_of_quotient() {
        let eps = ExactRational::new(1, 3).unwrap();
        let t = (ExactRational::from_integer(64) / eps).ceil();
        assert_eq!(t, BigInt::from(192));
    }
}
