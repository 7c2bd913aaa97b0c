//! Positional numerals as strings over the alphabet `a..j`.
//!
//! Letters map to digit values `a = 0, ..., j = 9`, forced by requiring that
//! `a.aa` names zero and `b.a` names one in the base structure. A basis picks
//! the zero string and the unit string; the unit's base-structure value is the
//! scaling factor `t`, and every numeral's scaled value is its base value
//! divided by `t`. Trailing `a` letters after the point never change a value.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumeralError {
    #[error("illegal character {ch:?} at position {pos}")]
    IllegalCharacter { ch: char, pos: usize },
    #[error("numeral contains more than one point")]
    MultiplePoints,
    #[error("numeral contains no digits")]
    EmptyDigits,
    #[error("zero string {0:?} does not have value 0")]
    NonzeroZeroString(String),
    #[error("unit string {0:?} has value 0")]
    ZeroUnitString(String),
}

/// A parsed numeral in canonical form: leading `a`s of the integer part and
/// trailing `a`s of the fraction are stripped (neither carries value).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumeralString {
    negative: bool,
    int_digits: Vec<u8>,
    frac_digits: Vec<u8>,
    raw: String,
}

pub fn parse(text: &str) -> Result<NumeralString, NumeralError> {
    let mut negative = false;
    let mut int_digits = Vec::new();
    let mut frac_digits = Vec::new();
    let mut seen_point = false;
    let mut seen_digit = false;

    for (pos, ch) in text.chars().enumerate() {
        match ch {
            '+' | '-' if pos == 0 => negative = ch == '-',
            '.' if seen_point => return Err(NumeralError::MultiplePoints),
            '.' => seen_point = true,
            'a'..='j' => {
                seen_digit = true;
                let d = ch as u8 - b'a';
                if seen_point {
                    frac_digits.push(d);
                } else {
                    int_digits.push(d);
                }
            }
            _ => return Err(NumeralError::IllegalCharacter { ch, pos }),
        }
    }
    if !seen_digit {
        return Err(NumeralError::EmptyDigits);
    }

    while int_digits.first() == Some(&0) {
        int_digits.remove(0);
    }
    while frac_digits.last() == Some(&0) {
        frac_digits.pop();
    }

    Ok(NumeralString {
        negative,
        int_digits,
        frac_digits,
        raw: text.to_string(),
    })
}

impl NumeralString {
    /// Base-structure value under the fixed digit map: positional base 10.
    pub fn canonical_value(&self) -> BigRational {
        let mut numer = BigInt::zero();
        for &d in self.int_digits.iter().chain(&self.frac_digits) {
            numer = numer * 10 + d;
        }
        let mut denom = BigInt::one();
        for _ in 0..self.frac_digits.len() {
            denom *= 10;
        }
        if self.negative {
            numer = -numer;
        }
        BigRational::new(numer, denom)
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    /// The canonical spelling: sign, integer letters (at least one), and the
    /// fraction with trailing `a`s removed.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        if self.negative {
            out.push('-');
        }
        if self.int_digits.is_empty() {
            out.push('a');
        }
        for &d in &self.int_digits {
            out.push((b'a' + d) as char);
        }
        if !self.frac_digits.is_empty() {
            out.push('.');
            for &d in &self.frac_digits {
                out.push((b'a' + d) as char);
            }
        }
        out
    }
}

/// Digit map plus chosen zero and unit strings. The unit's base value is the
/// scaling factor of the structure the basis describes.
#[derive(Debug, Clone, PartialEq)]
pub struct NumeralBasis {
    zero: NumeralString,
    unit: NumeralString,
    scale: BigRational,
}

impl NumeralBasis {
    pub fn new(zero: NumeralString, unit: NumeralString) -> Result<Self, NumeralError> {
        if !zero.canonical_value().is_zero() {
            return Err(NumeralError::NonzeroZeroString(zero.raw.clone()));
        }
        let scale = unit.canonical_value();
        if scale.is_zero() {
            return Err(NumeralError::ZeroUnitString(unit.raw.clone()));
        }
        Ok(Self { zero, unit, scale })
    }

    pub fn from_strs(zero: &str, unit: &str) -> Result<Self, NumeralError> {
        Self::new(parse(zero)?, parse(unit)?)
    }

    /// The scaling factor `t`: the unit string's base-structure value.
    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn zero_string(&self) -> &NumeralString {
        &self.zero
    }

    pub fn unit_string(&self) -> &NumeralString {
        &self.unit
    }

    /// Value of a numeral in this basis: the base value divided by `t`, so
    /// the unit string itself has scaled value exactly 1.
    pub fn scaled_value(&self, n: &NumeralString) -> BigRational {
        n.canonical_value() / &self.scale
    }
}

/// Total order on numerals: sign first (negative before positive, including
/// signed zero spellings), then digit order with the integer parts aligned by
/// leading-`a` padding. On same-sign pairs this agrees with numeric order.
pub fn lex_compare(m: &NumeralString, n: &NumeralString) -> Ordering {
    match (m.negative, n.negative) {
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        _ => {}
    }
    let magnitude = compare_magnitude(m, n);
    if m.negative {
        magnitude.reverse()
    } else {
        magnitude
    }
}

fn compare_magnitude(m: &NumeralString, n: &NumeralString) -> Ordering {
    // Canonical integer parts have no leading zeros, so longer means larger.
    match m.int_digits.len().cmp(&n.int_digits.len()) {
        Ordering::Equal => {}
        other => return other,
    }
    match m.int_digits.cmp(&n.int_digits) {
        Ordering::Equal => {}
        other => return other,
    }
    // Fractions align at the point; trailing zeros were stripped, so plain
    // lexicographic comparison is numeric.
    m.frac_digits.cmp(&n.frac_digits)
}

/// Exact textual form of a rational for reports: a finite decimal whenever
/// the reduced denominator divides a power of ten, otherwise `p/q`.
pub fn decimal_string(r: &BigRational) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let numer = r.numer().abs();
    let mut denom = r.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return format!("{}", r);
    }
    // Scale numerator so the denominator becomes 10^k with k = max(twos, fives).
    let k = twos.max(fives);
    let mut scaled = numer;
    for _ in 0..(k - twos) {
        scaled *= &two;
    }
    for _ in 0..(k - fives) {
        scaled *= &five;
    }
    let digits = scaled.to_string();
    let sign = if r.is_negative() { "-" } else { "" };
    if k == 0 {
        return format!("{sign}{digits}");
    }
    let k = k as usize;
    if digits.len() <= k {
        let mut frac = "0".repeat(k - digits.len());
        frac.push_str(&digits);
        format!("{sign}0.{frac}")
    } else {
        let (int_part, frac_part) = digits.split_at(digits.len() - k);
        format!("{sign}{int_part}.{frac_part}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(text: &str) -> BigRational {
        parse(text).unwrap().canonical_value()
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_valid_numerals() {
        assert!(parse("dfa.ggi").is_ok());
        assert!(parse("a.aafgdh").is_ok());
        assert!(parse("-a.jjhgbi").is_ok());
        assert!(parse("+b.a").is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse("xyz"),
            Err(NumeralError::IllegalCharacter { ch: 'x', pos: 0 })
        ));
        assert_eq!(parse("b..a"), Err(NumeralError::MultiplePoints));
        assert_eq!(parse("-."), Err(NumeralError::EmptyDigits));
        assert_eq!(parse(""), Err(NumeralError::EmptyDigits));
        // Sign is only allowed in front.
        assert!(matches!(
            parse("b-a"),
            Err(NumeralError::IllegalCharacter { ch: '-', pos: 1 })
        ));
    }

    #[test]
    fn worked_values() {
        assert_eq!(value("b.a"), BigRational::one());
        assert!(value("a.aa").is_zero());
        assert_eq!(value("-a.jjhgbi"), ratio(-997618, 1000000));
        assert_eq!(value("dbf.aag"), ratio(315006, 1000));
    }

    #[test]
    fn trailing_a_letters_carry_no_value() {
        assert_eq!(value("b.a"), value("b.aaaa"));
        assert_eq!(value("dfa.ggi"), value("dfa.ggiaa"));
        assert_eq!(parse("b.aaa").unwrap().canonical_text(), "b");
    }

    #[test]
    fn scaled_values_divide_by_the_unit() {
        let basis = NumeralBasis::from_strs("a.aa", "dbf.aag").unwrap();
        assert_eq!(basis.scale(), &ratio(315006, 1000));
        assert_eq!(
            basis.scaled_value(&parse("b.a").unwrap()),
            ratio(1000, 315006)
        );
        assert_eq!(
            basis.scaled_value(&parse("-a.jjhgbi").unwrap()),
            ratio(-997618, 1000000) / ratio(315006, 1000)
        );
        // The unit string itself always has scaled value exactly 1.
        assert_eq!(
            basis.scaled_value(&parse("dbf.aag").unwrap()),
            BigRational::one()
        );
    }

    #[test]
    fn basis_validation() {
        assert!(matches!(
            NumeralBasis::from_strs("b.a", "b.a"),
            Err(NumeralError::NonzeroZeroString(_))
        ));
        assert!(matches!(
            NumeralBasis::from_strs("a.aa", "a.a"),
            Err(NumeralError::ZeroUnitString(_))
        ));
    }

    #[test]
    fn lex_compare_examples() {
        let b_a = parse("b.a").unwrap();
        let a_aa = parse("a.aa").unwrap();
        assert_eq!(lex_compare(&b_a, &a_aa), Ordering::Greater);
        assert_eq!(lex_compare(&b_a, &b_a), Ordering::Equal);
        // Leading a's align away.
        assert_eq!(lex_compare(&parse("ab.a").unwrap(), &b_a), Ordering::Equal);
        // Negative ordering reverses magnitudes.
        assert_eq!(
            lex_compare(&parse("-b.a").unwrap(), &parse("-a.b").unwrap()),
            Ordering::Less
        );
    }

    #[test]
    fn decimal_strings_are_exact() {
        assert_eq!(decimal_string(&ratio(315006, 1000)), "315.006");
        assert_eq!(decimal_string(&ratio(-997618, 1000000)), "-0.997618");
        assert_eq!(decimal_string(&ratio(1, 1)), "1");
        assert_eq!(decimal_string(&ratio(0, 1)), "0");
        assert_eq!(decimal_string(&ratio(1000, 315006)), "500/157503");
        assert_eq!(decimal_string(&ratio(1, 8)), "0.125");
    }
}
