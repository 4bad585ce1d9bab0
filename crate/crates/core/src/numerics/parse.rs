//! Parsing of value literals used by the command line and config files.
//!
//! Accepted forms:
//!
//! * `inf` for the point at infinity,
//! * `surd(p,q,d,r)` for `(p + q*sqrt(d))/r`,
//! * `rat(p,q)` for the rational `p/q`,
//! * plain integers like `-3`,
//! * decimals like `100.3`, which carry their quantum (one unit in the
//!   last printed place) so callers can treat them either as exact
//!   rationals or as input intervals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::surd::{QuadraticSurd, SurdError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unrecognized value literal {0:?}")]
    Malformed(String),
    #[error("literal {0:?}: {1}")]
    BadSurd(String, SurdError),
    #[error("literal {0:?}: denominator is zero")]
    ZeroDenominator(String),
}

/// A parsed value literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueLiteral {
    /// Exact value: integer, rational, or quadratic surd.
    Exact(QuadraticSurd),
    /// Decimal text: the exact rational it denotes plus the size of one
    /// unit in its last printed place.
    Decimal { value: BigRational, quantum: BigRational },
    /// The projective point at infinity.
    Infinity,
}

impl ValueLiteral {
    /// The literal as an exact surd, reading decimals at face value.
    /// `Infinity` yields `None`.
    pub fn as_exact(&self) -> Option<QuadraticSurd> {
        match self {
            ValueLiteral::Exact(s) => Some(s.clone()),
            ValueLiteral::Decimal { value, .. } => Some(QuadraticSurd::from_rational(value)),
            ValueLiteral::Infinity => None,
        }
    }

    /// The input interval a decimal literal denotes: value plus or minus
    /// half a unit in the last place. Exact literals give a point
    /// interval; `Infinity` yields `None`.
    pub fn as_interval(&self) -> Option<(BigRational, BigRational)> {
        match self {
            ValueLiteral::Exact(s) => {
                let rat = s.to_rational()?;
                Some((rat.clone(), rat))
            }
            ValueLiteral::Decimal { value, quantum } => {
                let half = quantum / BigRational::from_integer(BigInt::from(2));
                Some((value - &half, value + &half))
            }
            ValueLiteral::Infinity => None,
        }
    }
}

impl fmt::Display for ValueLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueLiteral::Exact(s) => write!(f, "{s}"),
            ValueLiteral::Decimal { value, .. } => write!(f, "{value}"),
            ValueLiteral::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for ValueLiteral {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_value(s)
    }
}

fn parse_bigint(text: &str) -> Option<BigInt> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    BigInt::from_str(t).ok()
}

fn call_args<'a>(s: &'a str, name: &str, arity: usize) -> Option<Vec<&'a str>> {
    let body = s.strip_prefix(name)?.trim();
    let body = body.strip_prefix('(')?.strip_suffix(')')?;
    let parts: Vec<&str> = body.split(',').collect();
    (parts.len() == arity).then_some(parts)
}

/// Parses one value literal.
pub fn parse_value(input: &str) -> Result<ValueLiteral, ParseError> {
    let s = input.trim();
    let malformed = || ParseError::Malformed(input.to_string());

    if s.eq_ignore_ascii_case("inf") || s == "∞" {
        return Ok(ValueLiteral::Infinity);
    }

    if let Some(args) = call_args(s, "surd", 4) {
        let vals: Vec<BigInt> = args
            .iter()
            .map(|a| parse_bigint(a))
            .collect::<Option<_>>()
            .ok_or_else(malformed)?;
        let surd = QuadraticSurd::new(
            vals[0].clone(),
            vals[1].clone(),
            vals[2].clone(),
            vals[3].clone(),
        )
        .map_err(|e| ParseError::BadSurd(input.to_string(), e))?;
        return Ok(ValueLiteral::Exact(surd));
    }

    if let Some(args) = call_args(s, "rat", 2) {
        let p = parse_bigint(args[0]).ok_or_else(malformed)?;
        let q = parse_bigint(args[1]).ok_or_else(malformed)?;
        if q == BigInt::from(0) {
            return Err(ParseError::ZeroDenominator(input.to_string()));
        }
        return Ok(ValueLiteral::Exact(
            QuadraticSurd::new(p, 0, 0, q).expect("nonzero denominator checked"),
        ));
    }

    if let Some(n) = parse_bigint(s) {
        return Ok(ValueLiteral::Exact(QuadraticSurd::from_int(n)));
    }

    // Decimal: [sign] digits "." digits
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1, r),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    if let Some((int_part, frac_part)) = rest.split_once('.') {
        let all_digits =
            |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if all_digits(int_part) && all_digits(frac_part) {
            let scale = BigInt::from(10u8).pow(frac_part.len() as u32);
            let digits = BigInt::from_str(&format!("{int_part}{frac_part}"))
                .map_err(|_| malformed())?;
            let value = BigRational::new(BigInt::from(sign) * digits, scale.clone());
            let quantum = BigRational::new(BigInt::from(1), scale);
            return Ok(ValueLiteral::Decimal { value, quantum });
        }
    }

    Err(malformed())
}
