//! Exact complex rational arithmetic.
//!
//! `ExactComplex` is the exact backend for the scaled-number structures: a
//! complex number with `BigRational` real and imaginary parts. All four field
//! operations and conjugation are closed with no rounding, so algebraic
//! identities can be asserted with `==`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_integers(re: i64, im: i64) -> Self {
        Self {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    /// Build from two ratios `re_num/re_den + (im_num/im_den) i`.
    pub fn from_ratios(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self {
            re: BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
            im: BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
        }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Self::from_integers(0, 0)
    }

    pub fn one() -> Self {
        Self::from_integers(1, 0)
    }

    pub fn i() -> Self {
        Self::from_integers(0, 1)
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// |z|^2 as an exact rational.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Lossy conversion for reporting.
    pub fn to_f64(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl Add for ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: ExactComplex) -> ExactComplex {
        ExactComplex { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: ExactComplex) -> ExactComplex {
        ExactComplex { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: ExactComplex) -> ExactComplex {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        ExactComplex { re, im }
    }
}

impl Div for ExactComplex {
    type Output = ExactComplex;
    /// Panics on a zero divisor, like rational division.
    fn div(self, rhs: ExactComplex) -> ExactComplex {
        let denom = rhs.norm_sq();
        let re = (&self.re * &rhs.re + &self.im * &rhs.im) / &denom;
        let im = (&self.im * &rhs.re - &self.re * &rhs.im) / &denom;
        ExactComplex { re, im }
    }
}

impl Neg for ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        ExactComplex { re: -self.re, im: -self.im }
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Parse a plain decimal literal such as `-12.47` into an exact rational.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let mut numer = BigInt::zero();
    for c in int_part.chars().chain(frac_part.chars()) {
        numer = numer * 10 + (c as u8 - b'0');
    }
    let mut denom = BigInt::one();
    for _ in 0..frac_part.len() {
        denom *= 10;
    }
    if negative {
        numer = -numer;
    }
    Some(BigRational::new(numer, denom))
}

fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops_are_exact() {
        let a = ExactComplex::from_ratios(1, 3, -2, 7);
        let b = ExactComplex::from_ratios(5, 11, 4, 9);
        let prod = a.clone() * b.clone();
        let back = prod / b;
        assert_eq!(back, a);
    }

    #[test]
    fn conjugation_involutes() {
        let a = ExactComplex::from_ratios(3, 4, 9, 2);
        assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(
            parse_decimal("12.47").unwrap(),
            BigRational::new(BigInt::from(1247), BigInt::from(100))
        );
        assert_eq!(
            parse_decimal("-0.997618").unwrap(),
            BigRational::new(BigInt::from(-997618), BigInt::from(1000000))
        );
        assert!(parse_decimal("12.4x").is_none());
        assert!(parse_decimal(".").is_none());
    }
}
