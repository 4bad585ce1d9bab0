//! Nearest-integer minus continued fractions.
//!
//! The expansion of a real `x` is `a0 - 1/(a1 - 1/(a2 - ...))` where each
//! digit is the nearest integer (ties away from zero) and the state moves
//! by `x -> 1/(a - x)`. Tail digits satisfy `|a_j| >= 2`, and a digit of
//! absolute value exactly 2 must be followed by one of the opposite sign.
//! Expansions of quadratic surds are eventually periodic and the period
//! is detected by exact recurrence of the surd state.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::numerics::{nearest_int_rational, QuadraticSurd, UnimodularMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HurwitzError {
    #[error("rational input has a terminating expansion")]
    RationalInput,
    #[error("digit at index {0} does not fit in 64 bits")]
    DigitOverflow(usize),
    #[error("gauss step is undefined at zero")]
    ZeroValue,
    #[error("value lies outside [-1/2, 1/2]")]
    OutOfDomain,
    #[error("empty digit sequence")]
    EmptyDigits,
    #[error("division by zero evaluating the tail at index {0}")]
    ZeroTail(usize),
    #[error("word has trace {0}, not hyperbolic")]
    NotHyperbolic(BigInt),
}

/// A (prefix of a) minus continued fraction expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigitSequence {
    /// Digits `a_0, a_1, ...` in order.
    pub digits: Vec<i64>,
    /// `(start, length)` of the repeating cycle, when one was proven by
    /// recurrence of the exact expansion state.
    pub period: Option<(usize, usize)>,
    /// Human-readable description of the expanded value.
    pub source: String,
    /// True when a bracket expansion had to stop early because the input
    /// precision no longer determines the next digit.
    pub exhausted: bool,
}

/// One violation of the digit rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityViolation {
    pub index: usize,
    pub digit: i64,
    pub rule: ValidityRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ValidityRule {
    /// `|a_j| < 2` at a tail index.
    TooSmall,
    /// `|a_j| = 2` not followed by a digit of the opposite sign.
    SignPair,
}

/// Report listing every digit-rule violation in a sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub violations: Vec<ValidityViolation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn digit_to_i64(d: &BigInt, index: usize) -> Result<i64, HurwitzError> {
    d.to_i64().ok_or(HurwitzError::DigitOverflow(index))
}

/// Expands an irrational quadratic surd to `n` digits, detecting the
/// eventual period by recurrence of the exact state.
pub fn expand(x: &QuadraticSurd, n: usize) -> Result<DigitSequence, HurwitzError> {
    if x.is_rational() {
        return Err(HurwitzError::RationalInput);
    }
    assert!(n >= 1, "expansion length must be at least 1");
    let source = x.to_string();
    let mut digits: Vec<i64> = Vec::with_capacity(n);
    let mut seen: HashMap<QuadraticSurd, usize> = HashMap::new();
    let mut period = None;
    let mut state = x.clone();
    loop {
        if let Some(&start) = seen.get(&state) {
            period = Some((start, digits.len() - start));
            break;
        }
        if digits.len() == n {
            break;
        }
        seen.insert(state.clone(), digits.len());
        let a = digit_to_i64(&state.nearest_int(), digits.len())?;
        digits.push(a);
        state = (&QuadraticSurd::from_int(a) - &state).inv();
    }
    if let Some((start, len)) = period {
        while digits.len() < n {
            let idx = start + (digits.len() - start) % len;
            digits.push(digits[idx]);
        }
    }
    digits.truncate(n);
    Ok(DigitSequence {
        digits,
        period,
        source,
        exhausted: false,
    })
}

/// Expands a value known only as a rational interval `[lo, hi]`. Digits
/// are emitted while both endpoints agree; once they diverge the result
/// is marked exhausted.
pub fn expand_bracket(
    lo: &BigRational,
    hi: &BigRational,
    n: usize,
    source: impl Into<String>,
) -> Result<DigitSequence, HurwitzError> {
    assert!(lo <= hi, "bracket endpoints out of order");
    let mut digits = Vec::new();
    let mut exhausted = false;
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    while digits.len() < n {
        let a_lo = nearest_int_rational(&lo);
        if a_lo != nearest_int_rational(&hi) {
            exhausted = true;
            break;
        }
        let a = digit_to_i64(&a_lo, digits.len())?;
        // The state map x -> 1/(a - x) is increasing where defined; it
        // only determines the next interval if a - x keeps one sign.
        let d_lo = BigRational::from_integer(a_lo.clone()) - &lo;
        let d_hi = BigRational::from_integer(a_lo) - &hi;
        digits.push(a);
        if d_lo.is_zero() && d_hi.is_zero() {
            // the value is exactly this finite expansion
            break;
        }
        if d_lo.is_zero() || d_hi.is_zero() || d_lo.is_positive() != d_hi.is_positive() {
            exhausted = digits.len() < n;
            break;
        }
        (lo, hi) = (d_lo.recip(), d_hi.recip());
    }
    Ok(DigitSequence {
        digits,
        period: None,
        source: source.into(),
        exhausted,
    })
}

/// Checks the tail-digit rules on indices `j >= 1`.
pub fn validate(digits: &[i64]) -> ValidityReport {
    let mut violations = Vec::new();
    for (j, &a) in digits.iter().enumerate().skip(1) {
        if a.abs() < 2 {
            violations.push(ValidityViolation {
                index: j,
                digit: a,
                rule: ValidityRule::TooSmall,
            });
        } else if a.abs() == 2 {
            if let Some(&next) = digits.get(j + 1) {
                if a.saturating_mul(next) >= 0 {
                    violations.push(ValidityViolation {
                        index: j,
                        digit: a,
                        rule: ValidityRule::SignPair,
                    });
                }
            }
        }
    }
    ValidityReport { violations }
}

/// Checks the digit rules on a block read cyclically, i.e. as the
/// infinite repetition `b_0, ..., b_{n-1}, b_0, ...`.
pub fn validate_cyclic(block: &[i64]) -> ValidityReport {
    let mut violations = Vec::new();
    for (j, &a) in block.iter().enumerate() {
        if a.abs() < 2 {
            violations.push(ValidityViolation {
                index: j,
                digit: a,
                rule: ValidityRule::TooSmall,
            });
        } else if a.abs() == 2 {
            let next = block[(j + 1) % block.len()];
            if a.saturating_mul(next) >= 0 {
                violations.push(ValidityViolation {
                    index: j,
                    digit: a,
                    rule: ValidityRule::SignPair,
                });
            }
        }
    }
    ValidityReport { violations }
}

/// Evaluates a finite expansion right to left, exactly.
pub fn evaluate(digits: &[i64]) -> Result<BigRational, HurwitzError> {
    let (&last, rest) = digits.split_last().ok_or(HurwitzError::EmptyDigits)?;
    let mut acc = BigRational::from_integer(BigInt::from(last));
    for (j, &a) in rest.iter().enumerate().rev() {
        if acc.is_zero() {
            return Err(HurwitzError::ZeroTail(j + 1));
        }
        acc = BigRational::from_integer(BigInt::from(a)) - acc.recip();
    }
    Ok(acc)
}

/// One step of the interval map: digit `nu(-1/x)` and the remainder
/// `-1/x - digit`, which lies in `[-1/2, 1/2]` again.
pub fn gauss_step(x: &QuadraticSurd) -> Result<(i64, QuadraticSurd), HurwitzError> {
    if x.is_zero() {
        return Err(HurwitzError::ZeroValue);
    }
    if x.is_rational() {
        return Err(HurwitzError::RationalInput);
    }
    let half = QuadraticSurd::new(1, 0, 0, 2).unwrap();
    if x.abs().cmp_value(&half) == std::cmp::Ordering::Greater {
        return Err(HurwitzError::OutOfDomain);
    }
    let y = -x.inv();
    let a = digit_to_i64(&y.nearest_int(), 0)?;
    let next = &y - &QuadraticSurd::from_int(a);
    Ok((a, next))
}

/// The exact value whose expansion repeats the given block forever: the
/// attracting fixed point of the block's Moebius word.
pub fn periodic_value(block: &[i64]) -> Result<QuadraticSurd, HurwitzError> {
    if block.is_empty() {
        return Err(HurwitzError::EmptyDigits);
    }
    let mut m = UnimodularMatrix::identity();
    for &b in block {
        m = m.mul(&UnimodularMatrix::block(b));
    }
    let (m11, _, m21, m22) = m.entries();
    let tr = m.trace();
    if tr.magnitude() <= BigInt::from(2).magnitude() {
        return Err(HurwitzError::NotHyperbolic(tr));
    }
    // Fixed points of (m11 z + m12)/(m21 z + m22) = z; m21 is nonzero
    // because integer triangular matrices of determinant 1 have trace +-2.
    let disc = &tr * &tr - BigInt::from(4);
    let two_m21 = BigInt::from(2) * m21;
    let mut attracting = None;
    for sgn in [1i64, -1] {
        let root = QuadraticSurd::new(m11 - m22, sgn, disc.clone(), two_m21.clone())
            .expect("m21 nonzero for hyperbolic words");
        let mult = &(&QuadraticSurd::from_int(m21.clone()) * &root)
            + &QuadraticSurd::from_int(m22.clone());
        if mult.abs().cmp_int(1) == std::cmp::Ordering::Greater {
            assert!(
                attracting.is_none(),
                "both fixed points claim to attract for block {block:?}"
            );
            attracting = Some(root);
        }
    }
    Ok(attracting.expect("a hyperbolic word has an attracting fixed point"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surd(p: i64, q: i64, d: i64, r: i64) -> QuadraticSurd {
        QuadraticSurd::new(p, q, d, r).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn expand_golden_values() {
        // (3 + sqrt5)/2 is the fixed point of x = 3 - 1/x
        let phi2 = surd(3, 1, 5, 2);
        let seq = expand(&phi2, 5).unwrap();
        assert_eq!(seq.digits, vec![3, 3, 3, 3, 3]);
        assert_eq!(seq.period, Some((0, 1)));

        // 1 + sqrt2 alternates 2, -2
        let seq = expand(&surd(1, 1, 2, 1), 4).unwrap();
        assert_eq!(seq.digits, vec![2, -2, 2, -2]);
        assert_eq!(seq.period, Some((0, 2)));

        // sqrt2 has a one-digit head before the cycle
        let seq = expand(&surd(0, 1, 2, 1), 5).unwrap();
        assert_eq!(seq.digits, vec![1, -2, 2, -2, 2]);
        assert_eq!(seq.period, Some((1, 2)));
        assert!(!seq.exhausted);
    }

    #[test]
    fn expand_rejects_rationals() {
        assert_eq!(
            expand(&QuadraticSurd::from_int(3), 4),
            Err(HurwitzError::RationalInput)
        );
        assert_eq!(
            expand(&surd(7, 0, 0, 2), 4),
            Err(HurwitzError::RationalInput)
        );
    }

    #[test]
    fn validity_reports() {
        assert!(validate(&[3, 3, 3]).is_valid());
        assert!(validate(&[4, -2, 3]).is_valid());
        let report = validate(&[5, 2, 2]);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].index, 1);
        assert_eq!(report.violations[0].rule, ValidityRule::SignPair);
        // head digit is unconstrained
        assert!(validate(&[0, 5, 7]).is_valid());
        assert!(validate(&[1, -2, 2]).is_valid());
        let report = validate(&[3, 1, 3]);
        assert_eq!(report.violations[0].rule, ValidityRule::TooSmall);
    }

    #[test]
    fn cyclic_validity_wraps() {
        assert!(validate_cyclic(&[3]).is_valid());
        assert!(validate_cyclic(&[2, -2]).is_valid());
        // 2 followed cyclically by 3 violates the sign rule
        assert!(!validate_cyclic(&[3, 2]).is_valid());
        assert!(!validate_cyclic(&[2]).is_valid());
        assert!(validate_cyclic(&[3, -2]).is_valid());
    }

    #[test]
    fn evaluate_golden() {
        assert_eq!(evaluate(&[3, 3]).unwrap(), rat(8, 3));
        assert_eq!(evaluate(&[2, -2]).unwrap(), rat(5, 2));
        assert_eq!(evaluate(&[3, 3, 3]).unwrap(), rat(21, 8));
        assert_eq!(evaluate(&[7]).unwrap(), rat(7, 1));
        assert_eq!(evaluate(&[]), Err(HurwitzError::EmptyDigits));
        assert_eq!(evaluate(&[5, 0]), Err(HurwitzError::ZeroTail(1)));
    }

    #[test]
    fn convergents_approach_the_value() {
        // |21/8 - (3+sqrt5)/2| < |8/3 - (3+sqrt5)/2|, checked exactly
        let target = surd(3, 1, 5, 2);
        let c2 = QuadraticSurd::from_rational(&evaluate(&[3, 3]).unwrap());
        let c3 = QuadraticSurd::from_rational(&evaluate(&[3, 3, 3]).unwrap());
        let d2 = (&c2 - &target).abs();
        let d3 = (&c3 - &target).abs();
        assert_eq!(d3.cmp_value(&d2), std::cmp::Ordering::Less);
    }

    #[test]
    fn gauss_step_golden() {
        // x = sqrt2 - 1: -1/x = -(1 + sqrt2), digit -2, remainder -(sqrt2 - 1)
        let (a, next) = gauss_step(&surd(-1, 1, 2, 1)).unwrap();
        assert_eq!(a, -2);
        assert_eq!(next, surd(1, -1, 2, 1));
        // x = sqrt5 - 2: -1/x = -(2 + sqrt5), digit -4
        let (a, next) = gauss_step(&surd(-2, 1, 5, 1)).unwrap();
        assert_eq!(a, -4);
        assert_eq!(next, surd(2, -1, 5, 1));
        // mirrored input mirrors the output
        let (a, next) = gauss_step(&surd(1, -1, 2, 1)).unwrap();
        assert_eq!(a, 2);
        assert_eq!(next, surd(-1, 1, 2, 1));
    }

    #[test]
    fn gauss_step_domain_errors() {
        assert_eq!(gauss_step(&QuadraticSurd::zero()), Err(HurwitzError::ZeroValue));
        assert_eq!(gauss_step(&surd(1, 0, 0, 3)), Err(HurwitzError::RationalInput));
        assert_eq!(gauss_step(&surd(0, 1, 2, 1)), Err(HurwitzError::OutOfDomain));
    }

    #[test]
    fn gauss_stream_matches_expansion_tail() {
        for x in [surd(0, 1, 2, 1), surd(0, 1, 7, 1), surd(1, 3, 11, 5)] {
            let seq = expand(&x, 12).unwrap();
            let a0 = QuadraticSurd::from_int(seq.digits[0]);
            let mut state = &x - &a0;
            let mut tail = Vec::new();
            for _ in 1..12 {
                let (a, next) = gauss_step(&state).unwrap();
                tail.push(a);
                state = next;
            }
            assert_eq!(tail, seq.digits[1..], "tail of {x}");
        }
    }

    #[test]
    fn periodic_value_golden() {
        assert_eq!(periodic_value(&[3]).unwrap(), surd(3, 1, 5, 2));
        assert_eq!(periodic_value(&[2, -2]).unwrap(), surd(1, 1, 2, 1));
        assert_eq!(periodic_value(&[4]).unwrap(), surd(2, 1, 3, 1));
    }

    #[test]
    fn periodic_value_errors() {
        assert_eq!(periodic_value(&[]), Err(HurwitzError::EmptyDigits));
        assert!(matches!(
            periodic_value(&[2]),
            Err(HurwitzError::NotHyperbolic(_))
        ));
        assert!(matches!(
            periodic_value(&[1]),
            Err(HurwitzError::NotHyperbolic(_))
        ));
    }

    #[test]
    fn round_trip_block() {
        for block in [vec![3], vec![2, -2], vec![3, -2], vec![4, 5, -2]] {
            assert!(validate_cyclic(&block).is_valid(), "{block:?}");
            let value = periodic_value(&block).unwrap();
            let seq = expand(&value, block.len() * 3).unwrap();
            let expected: Vec<i64> =
                block.iter().copied().cycle().take(block.len() * 3).collect();
            assert_eq!(seq.digits, expected, "block {block:?} value {value}");
            assert_eq!(seq.period, Some((0, block.len())));
        }
    }

    #[test]
    fn bracket_expansion_stops_honestly() {
        // 100.3 +- 0.05: first digit 100 is certain, the next is not.
        let seq = expand_bracket(&rat(2005, 20), &rat(2007, 20), 10, "100.3").unwrap();
        assert_eq!(seq.digits, vec![100]);
        assert!(seq.exhausted);

        // a tight bracket around sqrt2 reproduces its expansion prefix
        let lo = rat(141_421_356, 100_000_000);
        let hi = rat(141_421_357, 100_000_000);
        let seq = expand_bracket(&lo, &hi, 20, "sqrt2 approx").unwrap();
        let exact = expand(&surd(0, 1, 2, 1), seq.digits.len()).unwrap();
        assert!(seq.digits.len() >= 5, "got {:?}", seq.digits);
        assert_eq!(seq.digits, exact.digits[..seq.digits.len()]);
        assert!(seq.exhausted);

        // an exact point bracket terminates cleanly at a finite expansion
        let seq = expand_bracket(&rat(5, 2), &rat(5, 2), 10, "5/2").unwrap();
        assert_eq!(seq.digits, vec![3, 2]);
        assert!(!seq.exhausted);
        assert_eq!(evaluate(&seq.digits).unwrap(), rat(5, 2));
    }

    #[test]
    fn period_detected_exactly_at_cutoff() {
        // period closes at digit n: still reported
        let seq = expand(&surd(3, 1, 5, 2), 1).unwrap();
        assert_eq!(seq.digits, vec![3]);
        assert_eq!(seq.period, Some((0, 1)));
    }

    #[test]
    fn expansion_states_stay_valid() {
        // a handful of assorted surds: every tail digit obeys the rules
        for (p, q, d, r) in [
            (0, 1, 2, 1),
            (0, 1, 61, 1),
            (5, -3, 19, 7),
            (-4, 1, 73, 3),
            (10, 7, 1234, 99),
        ] {
            let x = surd(p, q, d, r);
            let seq = expand(&x, 40).unwrap();
            assert!(validate(&seq.digits).is_valid(), "digits of {x}: {:?}", seq.digits);
        }
    }
}
