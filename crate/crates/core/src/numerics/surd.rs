//! Exact arithmetic on real quadratic surds `(p + q*sqrt(d)) / r`.
//!
//! Values are kept in a canonical form so that structural equality means
//! value equality within a fixed radicand: `r > 0`, `gcd(p, q, r) = 1`,
//! rationals are stored with `q = 0, d = 0`, and square factors of `d`
//! found by trial division are folded into `q`. Ordering of two surds is
//! decided exactly with integer arithmetic even when their radicands
//! differ, which is what the reduction predicates need (they compare
//! orbit values against constants from a different quadratic field).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dyadic;

/// Error from constructing or combining surds.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurdError {
    #[error("zero denominator in surd")]
    ZeroDenominator,
    #[error("negative radicand {0} (only real surds are supported)")]
    NegativeRadicand(BigInt),
}

/// A real quadratic surd `(p + q*sqrt(d)) / r` with `BigInt` parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    r: BigInt,
}

/// Trial-division bound used when extracting square factors of a fresh
/// radicand. Orbit arithmetic never changes `d`, so this only matters at
/// construction time; a huge radicand keeps any square factor above the
/// bound, which is harmless for value semantics.
const SQUARE_EXTRACTION_BOUND: u64 = 4096;

impl QuadraticSurd {
    /// Builds `(p + q*sqrt(d)) / r` and canonicalizes.
    pub fn new(
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
        d: impl Into<BigInt>,
        r: impl Into<BigInt>,
    ) -> Result<Self, SurdError> {
        let (p, q, d, r) = (p.into(), q.into(), d.into(), r.into());
        if r.is_zero() {
            return Err(SurdError::ZeroDenominator);
        }
        if d.is_negative() && !q.is_zero() {
            return Err(SurdError::NegativeRadicand(d));
        }
        let mut s = QuadraticSurd { p, q, d, r };
        s.canonicalize();
        Ok(s)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        QuadraticSurd {
            p: n.into(),
            q: BigInt::zero(),
            d: BigInt::zero(),
            r: BigInt::one(),
        }
    }

    pub fn from_rational(x: &BigRational) -> Self {
        QuadraticSurd {
            p: x.numer().clone(),
            q: BigInt::zero(),
            d: BigInt::zero(),
            r: x.denom().clone(),
        }
    }

    /// `sqrt(x)` of a non-negative rational, as a surd.
    pub fn sqrt_rational(x: &BigRational) -> Result<Self, SurdError> {
        if x.is_negative() {
            return Err(SurdError::NegativeRadicand(x.numer().clone()));
        }
        // sqrt(n/d) = sqrt(n*d)/d
        QuadraticSurd::new(BigInt::zero(), BigInt::one(), x.numer() * x.denom(), x.denom().clone())
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// Canonical parts `(p, q, d, r)`.
    pub fn parts(&self) -> (&BigInt, &BigInt, &BigInt, &BigInt) {
        (&self.p, &self.q, &self.d, &self.r)
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    fn canonicalize(&mut self) {
        if self.r.is_negative() {
            self.p = -std::mem::take(&mut self.p);
            self.q = -std::mem::take(&mut self.q);
            self.r = -std::mem::take(&mut self.r);
        }
        if self.q.is_zero() || self.d.is_zero() {
            self.q = BigInt::zero();
            self.d = BigInt::zero();
        } else {
            self.extract_square_part();
        }
        if self.d.is_one() {
            self.p += std::mem::take(&mut self.q);
            self.d = BigInt::zero();
        }
        let g = self.p.gcd(&self.q).gcd(&self.r);
        if !g.is_one() {
            self.p /= &g;
            self.q /= &g;
            self.r /= &g;
        }
    }

    fn extract_square_part(&mut self) {
        // Perfect squares fold completely.
        let root = self.d.sqrt();
        if &root * &root == self.d {
            self.q *= root;
            self.d = BigInt::one();
            return;
        }
        let mut f = BigInt::from(2);
        let bound = BigInt::from(SQUARE_EXTRACTION_BOUND);
        while &f * &f <= self.d && f <= bound {
            let sq = &f * &f;
            while (&self.d % &sq).is_zero() {
                self.d /= &sq;
                self.q *= &f;
            }
            f += 1u8;
        }
        let root = self.d.sqrt();
        if &root * &root == self.d {
            self.q *= root;
            self.d = BigInt::one();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(BigRational::new(self.p.clone(), self.r.clone()))
        } else {
            None
        }
    }

    /// Exact sign: -1, 0, or 1.
    pub fn signum(&self) -> i32 {
        // r > 0, so the sign is that of p + q*sqrt(d).
        sign_two_term(&self.p, &self.q, &self.d)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Exact value comparison, valid for any pair of radicands.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        // self - other = [s + t*sqrt(d1) - u*sqrt(d2)] / (r1 r2), r's > 0.
        let s = &self.p * &other.r - &other.p * &self.r;
        let t = &self.q * &other.r;
        let u = &other.q * &self.r;
        match sign_lincomb(&s, &t, &self.d, &u, &other.d) {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    pub fn cmp_rational(&self, other: &BigRational) -> Ordering {
        self.cmp_value(&QuadraticSurd::from_rational(other))
    }

    pub fn cmp_int(&self, other: i64) -> Ordering {
        self.cmp_value(&QuadraticSurd::from_int(other))
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero surd");
        // r/(p + q sqrt d) = r (p - q sqrt d) / (p^2 - q^2 d)
        let den = &self.p * &self.p - &self.q * &self.q * &self.d;
        QuadraticSurd::new(
            &self.r * &self.p,
            -(&self.r * &self.q),
            self.d.clone(),
            den,
        )
        .expect("nonzero surd has nonzero norm")
    }

    /// Nearest integer, ties rounded toward the integer of larger
    /// absolute value.
    pub fn nearest_int(&self) -> BigInt {
        // floor(x + 1/2) computed exactly, then the tie x + 1/2 = n
        // (only possible for rational x) is redirected away from zero.
        let shifted = QuadraticSurd::new(
            &self.p * BigInt::from(2) + &self.r,
            &self.q * BigInt::from(2),
            self.d.clone(),
            &self.r * BigInt::from(2),
        )
        .expect("shift preserves nonzero denominator");
        let f = shifted.floor();
        if shifted.is_rational() && shifted.to_rational().unwrap().is_integer() {
            // x = f - 1/2 exactly; away from zero means rounding down
            // when x is negative.
            if self.is_negative() {
                return f - 1;
            }
        }
        f
    }

    /// Largest integer `<= self`, computed exactly.
    pub fn floor(&self) -> BigInt {
        if let Some(rat) = self.to_rational() {
            return rat.floor().to_integer();
        }
        // floor((p + q sqrt d)/r) with r > 0: bound q*sqrt(d) by integer
        // square roots, then fix up with one exact comparison.
        let q2d = &self.q * &self.q * &self.d;
        let root = q2d.sqrt();
        let qs_floor = if self.q.is_negative() {
            // q sqrt d = -sqrt(q^2 d), and q^2 d is not a perfect square
            // here because the value is irrational.
            -&root - 1
        } else {
            root
        };
        let mut n = (&self.p + &qs_floor).div_floor(&self.r);
        // self >= n+1 would mean the fractional parts conspired across
        // the division; check exactly and adjust.
        loop {
            let next = QuadraticSurd::from_int(&n + 1);
            if self.cmp_value(&next) != Ordering::Less {
                n += 1;
            } else {
                break;
            }
        }
        loop {
            let cur = QuadraticSurd::from_int(n.clone());
            if self.cmp_value(&cur) == Ordering::Less {
                n -= 1;
            } else {
                break;
            }
        }
        n
    }

    /// Enclosing rational interval of width about `2^-bits`.
    pub fn brackets(&self, bits: u32) -> (BigRational, BigRational) {
        if let Some(rat) = self.to_rational() {
            return (rat.clone(), rat);
        }
        let (slo, shi) = dyadic::sqrt_brackets(
            &BigRational::new(self.d.clone(), BigInt::one()),
            bits + self.q.bits() as u32 + 1,
        );
        let p = BigRational::new(self.p.clone(), BigInt::one());
        let q = BigRational::new(self.q.clone(), BigInt::one());
        let r = BigRational::new(self.r.clone(), BigInt::one());
        let (a, b) = if self.q.is_negative() {
            (&p + &q * shi, &p + &q * slo)
        } else {
            (&p + &q * slo, &p + &q * shi)
        };
        (a / &r, b / r)
    }

    pub fn to_f64(&self) -> f64 {
        if let Some(rat) = self.to_rational() {
            return super::rational_to_f64(&rat);
        }
        let (lo, hi) = self.brackets(80);
        super::rational_to_f64(&((lo + hi) / BigRational::from_integer(BigInt::from(2))))
    }

    fn require_compatible(&self, other: &Self) -> BigInt {
        if self.q.is_zero() {
            return other.d.clone();
        }
        if other.q.is_zero() {
            return self.d.clone();
        }
        assert_eq!(
            self.d, other.d,
            "surd arithmetic across distinct radicands ({} vs {}); \
             only comparisons are defined cross-field",
            self.d, other.d
        );
        self.d.clone()
    }
}

impl fmt::Debug for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{})", self, self.to_f64())
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "rat({},{})", self.p, self.r)
        } else {
            write!(f, "surd({},{},{},{})", self.p, self.q, self.d, self.r)
        }
    }
}

impl From<i64> for QuadraticSurd {
    fn from(n: i64) -> Self {
        QuadraticSurd::from_int(n)
    }
}

impl From<BigRational> for QuadraticSurd {
    fn from(x: BigRational) -> Self {
        QuadraticSurd::from_rational(&x)
    }
}

impl Add for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn add(self, rhs: &QuadraticSurd) -> QuadraticSurd {
        let d = self.require_compatible(rhs);
        QuadraticSurd::new(
            &self.p * &rhs.r + &rhs.p * &self.r,
            &self.q * &rhs.r + &rhs.q * &self.r,
            d,
            &self.r * &rhs.r,
        )
        .expect("nonzero denominators")
    }
}

impl Sub for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn sub(self, rhs: &QuadraticSurd) -> QuadraticSurd {
        self + &(-rhs.clone())
    }
}

impl Mul for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn mul(self, rhs: &QuadraticSurd) -> QuadraticSurd {
        let d = self.require_compatible(rhs);
        QuadraticSurd::new(
            &self.p * &rhs.p + &self.q * &rhs.q * &d,
            &self.p * &rhs.q + &self.q * &rhs.p,
            d,
            &self.r * &rhs.r,
        )
        .expect("nonzero denominators")
    }
}

impl Div for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn div(self, rhs: &QuadraticSurd) -> QuadraticSurd {
        self * &rhs.inv()
    }
}

impl Neg for QuadraticSurd {
    type Output = QuadraticSurd;
    fn neg(mut self) -> QuadraticSurd {
        self.p = -self.p;
        self.q = -self.q;
        self
    }
}

macro_rules! owned_ops {
    ($($trait:ident, $method:ident);*) => {$(
        impl $trait for QuadraticSurd {
            type Output = QuadraticSurd;
            fn $method(self, rhs: QuadraticSurd) -> QuadraticSurd {
                (&self).$method(&rhs)
            }
        }
    )*};
}
owned_ops!(Add, add; Sub, sub; Mul, mul; Div, div);

/// Sign of `a + b*sqrt(c)` for `c >= 0`, by integer arithmetic.
fn sign_two_term(a: &BigInt, b: &BigInt, c: &BigInt) -> i32 {
    let sb = if c.is_zero() { 0 } else { b.signum().to_i32().unwrap() };
    let sa = a.signum().to_i32().unwrap();
    if sb == 0 {
        return sa;
    }
    if sa == sb || sa == 0 {
        return sb;
    }
    // Opposite signs: compare a^2 with b^2 c; the sign of the larger
    // magnitude wins.
    match (a * a).cmp(&(b * b * c)) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => 0,
    }
}

/// Sign of `t*sqrt(a) - u*sqrt(b)` for `a, b >= 0`.
fn sign_sqrt_diff(t: &BigInt, a: &BigInt, u: &BigInt, b: &BigInt) -> i32 {
    let st = if a.is_zero() { 0 } else { t.signum().to_i32().unwrap() };
    let su = if b.is_zero() { 0 } else { u.signum().to_i32().unwrap() };
    if st != su {
        // One side dominates by sign alone.
        return if st > su { 1 } else { -1 };
    }
    if st == 0 {
        return 0;
    }
    let cmp = (t * t * a).cmp(&(u * u * b));
    st * match cmp {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => 0,
    }
}

/// Sign of `s + t*sqrt(a) - u*sqrt(b)` for `a, b >= 0`, fully exact.
fn sign_lincomb(s: &BigInt, t: &BigInt, a: &BigInt, u: &BigInt, b: &BigInt) -> i32 {
    let sv = sign_sqrt_diff(t, a, u, b);
    let ss = s.signum().to_i32().unwrap();
    if ss == 0 {
        return sv;
    }
    if sv == 0 || sv == ss {
        return ss;
    }
    // s and the radical part disagree in sign; compare magnitudes via
    // s^2 - (t sqrt a - u sqrt b)^2 = k + m sqrt(ab).
    let k = s * s - t * t * a - u * u * b;
    let m = BigInt::from(2) * t * u;
    let c = a * b;
    match sign_two_term(&k, &m, &c) {
        1 => ss,
        -1 => sv,
        _ => 0,
    }
}
