//! Numeric foundations: exact surds, rational helpers, dyadic interval
//! transcendentals, certified lazy reals, and integer matrices.

pub mod certified;
pub mod dyadic;
pub mod matrix;
pub mod parse;
pub mod surd;

pub use certified::{certified_pi, CertifiedReal};
pub use matrix::{MatrixError, ProjectivePoint, UnimodularMatrix};
pub use parse::{ParseError, ValueLiteral};
pub use surd::{QuadraticSurd, SurdError};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Converts a rational to the nearest `f64`, robust to parts far beyond
/// `f64` range (the quotient is formed from the top 63 bits of each side).
pub fn rational_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let neg = x.is_negative();
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    fn top(v: &BigUint) -> (f64, i64) {
        let b = v.bits();
        if b <= 63 {
            (v.to_u64().unwrap() as f64, 0)
        } else {
            let shift = (b - 63) as usize;
            ((v >> shift).to_u64().unwrap() as f64, shift as i64)
        }
    }
    let (nf, ne) = top(n);
    let (df, de) = top(d);
    let v = (nf / df) * ((ne - de) as f64).exp2();
    if neg {
        -v
    } else {
        v
    }
}

/// Nearest integer with ties rounded away from zero.
pub fn nearest_int_rational(x: &BigRational) -> BigInt {
    let two = BigInt::from(2);
    let twice = &two * x.numer() + x.denom();
    let span = two * x.denom();
    let f = twice.div_floor(&span);
    if twice.mod_floor(&span).is_zero() && x.is_negative() {
        f - 1
    } else {
        f
    }
}

/// Formats `x` as a decimal with exactly `places` fractional digits,
/// rounded down (toward minus infinity) or up per `round_up`. The printed
/// value is guaranteed to be on the requested side of `x`.
pub fn decimal_string(x: &BigRational, places: usize, round_up: bool) -> String {
    let scale = BigInt::from(10u8).pow(places as u32);
    let scaled = x * BigRational::from_integer(scale.clone());
    let k = if round_up {
        scaled.ceil().to_integer()
    } else {
        scaled.floor().to_integer()
    };
    let neg = k.is_negative();
    let mag = k.magnitude().clone();
    if places == 0 {
        return format!("{}{}", if neg { "-" } else { "" }, mag);
    }
    let (int_part, frac_part) = mag.div_rem(scale.magnitude());
    format!(
        "{}{}.{:0width$}",
        if neg { "-" } else { "" },
        int_part,
        frac_part,
        width = places
    )
}

/// Largest `f64` strictly below `x` (identity on NaN and -inf).
pub fn f64_next_down(x: f64) -> f64 {
    -f64_next_up(-x)
}

/// Smallest `f64` strictly above `x` (identity on NaN and +inf).
pub fn f64_next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}
