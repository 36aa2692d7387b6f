//! Exact rationals and the `a·α + b·β` linear forms every index, worth,
//! dividend and potential is expressed in.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("`{0}` is not an integer or a `p/q` fraction")]
    Malformed(String),
    #[error("`{0}` has a zero denominator")]
    ZeroDenominator(String),
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"7"`, `"-3"` or `"23/3"`. Decimal notation is rejected.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let text = text.trim();
    let malformed = || ParseRationalError::Malformed(text.to_string());
    let (numer, denom) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let is_int = |s: &str| {
        let digits = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_int(numer) || !is_int(denom) || denom.starts_with('-') {
        return Err(malformed());
    }
    let numer = BigInt::from_str(numer).map_err(|_| malformed())?;
    let denom = BigInt::from_str(denom).map_err(|_| malformed())?;
    if denom.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(text.to_string()));
    }
    Ok(Rational::new(numer, denom))
}

/// `p/q`, or `p` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Market values of a primary license (`alpha`) and of a sublicense (`beta`).
///
/// Construction is unrestricted so that axiom checks can use arbitrary signs;
/// [`MarketParams::economic`] enforces the non-negative market regime.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarketParams {
    pub alpha: Rational,
    pub beta: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("market values must be non-negative, got alpha = {alpha}, beta = {beta}")]
pub struct NegativeMarketValue {
    pub alpha: String,
    pub beta: String,
}

impl MarketParams {
    pub fn new(alpha: Rational, beta: Rational) -> Self {
        Self { alpha, beta }
    }

    pub fn ints(alpha: i64, beta: i64) -> Self {
        Self::new(int(alpha), int(beta))
    }

    /// Parameters restricted to `alpha, beta >= 0`.
    pub fn economic(alpha: Rational, beta: Rational) -> Result<Self, NegativeMarketValue> {
        if alpha.is_negative() || beta.is_negative() {
            return Err(NegativeMarketValue { alpha: format_rational(&alpha), beta: format_rational(&beta) });
        }
        Ok(Self { alpha, beta })
    }

    /// `alpha = 1, beta = rho`.
    pub fn from_rho(rho: Rational) -> Self {
        Self::new(int(1), rho)
    }

    pub fn is_non_negative(&self) -> bool {
        !self.alpha.is_negative() && !self.beta.is_negative()
    }
}

/// The symbolic value `a·α + b·β`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LinearForm {
    pub a: Rational,
    pub b: Rational,
}

impl LinearForm {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn ints(a: i64, b: i64) -> Self {
        Self::new(int(a), int(b))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn alpha(a: Rational) -> Self {
        Self::new(a, Rational::zero())
    }

    pub fn beta(b: Rational) -> Self {
        Self::new(Rational::zero(), b)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn evaluate(&self, params: &MarketParams) -> Rational {
        &self.a * &params.alpha + &self.b * &params.beta
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(&self.a * factor, &self.b * factor)
    }
}

impl fmt::Display for LinearForm {
    /// Canonical rendering: `4*a + 23/3*b`, `-2*b`, `1*a - 1/2*b`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (coef, symbol) in [(&self.a, 'a'), (&self.b, 'b')] {
            if coef.is_zero() {
                continue;
            }
            let magnitude = format_rational(&coef.abs());
            if out.is_empty() {
                if coef.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if coef.is_negative() { " - " } else { " + " });
            }
            out.push_str(&magnitude);
            out.push('*');
            out.push(symbol);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a linear form in a and b")]
pub struct ParseLinearFormError(pub String);

impl FromStr for LinearForm {
    type Err = ParseLinearFormError;

    /// Inverse of the `Display` rendering.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = || ParseLinearFormError(text.to_string());
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "0" {
            return Ok(Self::zero());
        }
        let mut form = Self::zero();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'-' => (-1, &rest[1..]),
                b'+' => (1, &rest[1..]),
                _ => (1, rest),
            };
            if body.is_empty() {
                return Err(err());
            }
            let end = body[1..].find(['+', '-']).map(|p| p + 1).unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            let (coef, symbol) = term.rsplit_once('*').ok_or_else(err)?;
            let coef = parse_rational(coef).map_err(|_| err())? * int(sign);
            match symbol {
                "a" => form.a += coef,
                "b" => form.b += coef,
                _ => return Err(err()),
            }
        }
        Ok(form)
    }
}

impl Add for LinearForm {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl<'a> Add<&'a LinearForm> for &'a LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        LinearForm::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl AddAssign<&LinearForm> for LinearForm {
    fn add_assign(&mut self, rhs: &LinearForm) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl AddAssign for LinearForm {
    fn add_assign(&mut self, rhs: LinearForm) {
        self.a += rhs.a;
        self.b += rhs.b;
    }
}

impl Sub for LinearForm {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl<'a> Sub<&'a LinearForm> for &'a LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        LinearForm::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl SubAssign<&LinearForm> for LinearForm {
    fn sub_assign(&mut self, rhs: &LinearForm) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl Neg for LinearForm {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl Mul<&Rational> for &LinearForm {
    type Output = LinearForm;
    fn mul(self, rhs: &Rational) -> LinearForm {
        self.scale(rhs)
    }
}

impl Sum for LinearForm {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a LinearForm> for LinearForm {
    fn sum<I: Iterator<Item = &'a LinearForm>>(iter: I) -> Self {
        iter.fold(Self::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}
