//! Parsing of value and form literals and rendering of exact values in
//! the same round-trippable grammar: integers, `rat(p, q)`,
//! `surd(p, q, d, r)` for `(p + q sqrt(d)) / r`, decimals, and `inf`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use hurwitz_core::forms::BinaryForm;
use hurwitz_core::numerics::parse::parse_value;
use hurwitz_core::{ProjectivePoint, QuadraticSurd, ValueLiteral};

use crate::{CliError, CliResult};

/// Renders a surd as a literal that parses back to the same value.
pub fn render_surd(x: &QuadraticSurd) -> String {
    let (p, q, d, r) = x.parts();
    if q.is_zero() {
        if r.is_one() {
            p.to_string()
        } else {
            format!("rat({p},{r})")
        }
    } else {
        format!("surd({p},{q},{d},{r})")
    }
}

/// Renders a rational as an integer or a `rat(p, q)` literal.
pub fn render_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("rat({},{})", x.numer(), x.denom())
    }
}

/// Renders a rational for a CSV cell or column label: `p/q` plain, with
/// no comma that would break the row.
pub fn csv_rational(x: &BigRational) -> String {
    x.to_string()
}

/// Renders a projective point, `inf` for the point at infinity.
pub fn render_point(p: &ProjectivePoint) -> String {
    match p.finite() {
        Some(x) => render_surd(x),
        None => "inf".to_string(),
    }
}

/// Parses a value literal, naming `what` in the failure message.
pub fn parse_literal(text: &str, what: &str) -> CliResult<ValueLiteral> {
    parse_value(text).map_err(|e| CliError::Validation(format!("{what}: {e}")))
}

/// Parses a finite exact value; decimals denote their exact rational.
pub fn parse_exact(text: &str, what: &str) -> CliResult<QuadraticSurd> {
    parse_literal(text, what)?
        .as_exact()
        .ok_or_else(|| CliError::Validation(format!("{what} must be finite, got {text}")))
}

/// Parses a rational value, rejecting irrational surds and infinity.
pub fn parse_rational(text: &str, what: &str) -> CliResult<BigRational> {
    let exact = parse_exact(text, what)?;
    exact.to_rational().ok_or_else(|| {
        CliError::Validation(format!("{what} must be rational, got {text}"))
    })
}

/// Parses a strictly positive rational.
pub fn parse_positive_rational(text: &str, what: &str) -> CliResult<BigRational> {
    let value = parse_rational(text, what)?;
    if value.is_positive() {
        Ok(value)
    } else {
        Err(CliError::Validation(format!(
            "{what} must be positive, got {text}"
        )))
    }
}

/// Splits `body` at commas that sit outside any parentheses.
pub fn split_top_level(body: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&body[start..]);
    parts
}

/// Parses a `form(a=<value>, b=<value>, c=<value>, d=<value>)` literal.
/// The coefficients name the values `Q(x, y) = (a y + b x)(c y + d x)`
/// and must satisfy `a d - b c = 1`.
pub fn parse_form(text: &str) -> CliResult<BinaryForm> {
    let bad = |msg: String| CliError::Validation(format!("form literal: {msg}"));
    let s = text.trim();
    let body = s
        .strip_prefix("form")
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| bad(format!("expected form(a=..., b=..., c=..., d=...), got {s}")))?;
    let mut slots: [Option<QuadraticSurd>; 4] = [None, None, None, None];
    for part in split_top_level(body) {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got {part}")))?;
        let index = match key.trim() {
            "a" => 0,
            "b" => 1,
            "c" => 2,
            "d" => 3,
            other => return Err(bad(format!("unknown coefficient {other}"))),
        };
        if slots[index].is_some() {
            return Err(bad(format!("coefficient {} given twice", key.trim())));
        }
        slots[index] = Some(parse_exact(value.trim(), "form coefficient")?);
    }
    let [a, b, c, d] = slots;
    let missing = |name: &str| bad(format!("coefficient {name} is missing"));
    let a = a.ok_or_else(|| missing("a"))?;
    let b = b.ok_or_else(|| missing("b"))?;
    let c = c.ok_or_else(|| missing("c"))?;
    let d = d.ok_or_else(|| missing("d"))?;
    BinaryForm::from_coefficients(a, b, c, d)
        .map_err(|e| CliError::Validation(format!("form literal: {e}")))
}

/// Renders a form as the literal `parse_form` accepts.
pub fn render_form(form: &BinaryForm) -> String {
    let (a, b, c, d) = form.coefficients();
    format!(
        "form(a={}, b={}, c={}, d={})",
        render_surd(&a),
        render_surd(&b),
        render_surd(&c),
        render_surd(&d)
    )
}
