//! Lazily refined real numbers with certified rational enclosures.
//!
//! A `CertifiedReal` is either an exact rational or a node that can
//! recompute an enclosing interval at any requested effort level. Results
//! of refinement only ever shrink: new brackets are intersected with the
//! cached one, so every bracket handed out is valid for the lifetime of
//! the value. Transcendental functions come from the dyadic engine and
//! propagate monotone interval bounds.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dyadic;
use super::surd::QuadraticSurd;
use super::{f64_next_down, f64_next_up, rational_to_f64};

type RefineFn = Box<dyn Fn(u32) -> (BigRational, BigRational) + Send + Sync>;

struct Inner {
    cache: Mutex<Option<(BigRational, BigRational, u32)>>,
    refine: Option<RefineFn>,
}

/// A real number carrying a shrinking rational enclosure.
#[derive(Clone)]
pub struct CertifiedReal {
    inner: Arc<Inner>,
}

/// Hard ceiling on refinement effort, in bits. Hitting it means a
/// comparison was asked to separate values that are equal or nearly so.
pub const REFINE_CAP_BITS: u32 = 1 << 22;

const WIDE: i64 = 1 << 62;

fn wide_bracket() -> (BigRational, BigRational) {
    (
        BigRational::from_integer(BigInt::from(-WIDE)),
        BigRational::from_integer(BigInt::from(WIDE)),
    )
}

fn intersect(
    a: (BigRational, BigRational),
    b: (BigRational, BigRational),
) -> (BigRational, BigRational) {
    let lo = if a.0 > b.0 { a.0 } else { b.0 };
    let hi = if a.1 < b.1 { a.1 } else { b.1 };
    debug_assert!(lo <= hi, "certified brackets drifted apart");
    (lo, hi)
}

impl CertifiedReal {
    fn lazy(f: impl Fn(u32) -> (BigRational, BigRational) + Send + Sync + 'static) -> Self {
        CertifiedReal {
            inner: Arc::new(Inner {
                cache: Mutex::new(None),
                refine: Some(Box::new(f)),
            }),
        }
    }

    pub fn from_rational(x: BigRational) -> Self {
        CertifiedReal {
            inner: Arc::new(Inner {
                cache: Mutex::new(Some((x.clone(), x, u32::MAX))),
                refine: None,
            }),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_surd(s: &QuadraticSurd) -> Self {
        if let Some(rat) = s.to_rational() {
            return Self::from_rational(rat);
        }
        let s = s.clone();
        Self::lazy(move |bits| s.brackets(bits))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    /// The exact rational value, if this node is exact.
    pub fn exact(&self) -> Option<BigRational> {
        if self.inner.refine.is_none() {
            let guard = self.inner.cache.lock().unwrap();
            let (lo, _, _) = guard.as_ref().unwrap();
            Some(lo.clone())
        } else {
            None
        }
    }

    /// Recomputes the enclosure at the given effort level and returns the
    /// tightest bracket known so far.
    pub fn refine_to_bits(&self, bits: u32) -> (BigRational, BigRational) {
        let mut guard = self.inner.cache.lock().unwrap();
        if let Some((lo, hi, have)) = guard.as_ref() {
            if *have >= bits || self.inner.refine.is_none() {
                return (lo.clone(), hi.clone());
            }
        }
        let f = self.inner.refine.as_ref().expect("exact nodes always have a cache");
        let fresh = f(bits);
        debug_assert!(fresh.0 <= fresh.1, "refine produced an inverted bracket");
        let merged = match guard.take() {
            Some((lo, hi, _)) => intersect((lo, hi), fresh),
            None => fresh,
        };
        *guard = Some((merged.0.clone(), merged.1.clone(), bits));
        merged
    }

    /// Current bracket without forcing any work beyond a first cheap pass.
    pub fn bracket(&self) -> (BigRational, BigRational) {
        {
            let guard = self.inner.cache.lock().unwrap();
            if let Some((lo, hi, _)) = guard.as_ref() {
                return (lo.clone(), hi.clone());
            }
        }
        self.refine_to_bits(64)
    }

    /// Shrinks the bracket until its width is at most `eps`.
    ///
    /// Panics after `REFINE_CAP_BITS` of effort; use
    /// [`CertifiedReal::try_refine_until`] when failure must be survivable.
    pub fn refine_until(&self, eps: &BigRational) -> (BigRational, BigRational) {
        self.try_refine_until(eps, REFINE_CAP_BITS)
            .unwrap_or_else(|| panic!("bracket refinement stalled before width {eps}"))
    }

    /// Like [`CertifiedReal::refine_until`] but gives up at `cap` bits.
    pub fn try_refine_until(
        &self,
        eps: &BigRational,
        cap: u32,
    ) -> Option<(BigRational, BigRational)> {
        assert!(eps.is_positive(), "refinement width must be positive");
        let mut bits = {
            let guard = self.inner.cache.lock().unwrap();
            match guard.as_ref() {
                Some((lo, hi, have)) => {
                    if &(hi - lo) <= eps {
                        return Some((lo.clone(), hi.clone()));
                    }
                    have.saturating_mul(2).max(64)
                }
                None => 64,
            }
        };
        loop {
            let (lo, hi) = self.refine_to_bits(bits);
            if &(&hi - &lo) <= eps {
                return Some((lo, hi));
            }
            if bits >= cap {
                return None;
            }
            bits = bits.saturating_mul(2).min(cap);
        }
    }

    /// Midpoint of the current bracket after a 64-bit effort pass.
    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.refine_to_bits(64);
        rational_to_f64(&((lo + hi) / BigRational::from_integer(BigInt::from(2))))
    }

    /// Outward-rounded `f64` enclosure of the current bracket.
    pub fn bracket_f64(&self) -> (f64, f64) {
        let (lo, hi) = self.bracket();
        (f64_next_down(rational_to_f64(&lo)), f64_next_up(rational_to_f64(&hi)))
    }

    /// Decimal lower bound with the given number of fractional digits.
    pub fn decimal_lo(&self, places: usize, eps: &BigRational) -> String {
        let (lo, _) = self.refine_until(eps);
        super::decimal_string(&lo, places, false)
    }

    /// Decimal upper bound with the given number of fractional digits.
    pub fn decimal_hi(&self, places: usize, eps: &BigRational) -> String {
        let (_, hi) = self.refine_until(eps);
        super::decimal_string(&hi, places, true)
    }

    /// Exact ordering if it can be decided within `cap` bits of effort.
    pub fn try_cmp(&self, other: &CertifiedReal, cap: u32) -> Option<Ordering> {
        if let (Some(a), Some(b)) = (self.exact(), other.exact()) {
            return Some(a.cmp(&b));
        }
        let mut bits = 64;
        loop {
            let (alo, ahi) = self.refine_to_bits(bits);
            let (blo, bhi) = other.refine_to_bits(bits);
            if ahi < blo {
                return Some(Ordering::Less);
            }
            if alo > bhi {
                return Some(Ordering::Greater);
            }
            if bits >= cap {
                return None;
            }
            bits = bits.saturating_mul(2).min(cap);
        }
    }

    /// Sign of the value if it can be decided within `cap` bits.
    pub fn try_sign(&self, cap: u32) -> Option<i32> {
        self.try_cmp(&CertifiedReal::zero(), cap).map(|o| match o {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        })
    }

    pub fn add(&self, other: &CertifiedReal) -> CertifiedReal {
        if let (Some(a), Some(b)) = (self.exact(), other.exact()) {
            return Self::from_rational(a + b);
        }
        let (a, b) = (self.clone(), other.clone());
        Self::lazy(move |bits| {
            let (alo, ahi) = a.refine_to_bits(bits + 2);
            let (blo, bhi) = b.refine_to_bits(bits + 2);
            (alo + blo, ahi + bhi)
        })
    }

    pub fn sub(&self, other: &CertifiedReal) -> CertifiedReal {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CertifiedReal {
        if let Some(a) = self.exact() {
            return Self::from_rational(-a);
        }
        let a = self.clone();
        Self::lazy(move |bits| {
            let (lo, hi) = a.refine_to_bits(bits);
            (-hi, -lo)
        })
    }

    pub fn mul(&self, other: &CertifiedReal) -> CertifiedReal {
        if let (Some(a), Some(b)) = (self.exact(), other.exact()) {
            return Self::from_rational(a * b);
        }
        let (a, b) = (self.clone(), other.clone());
        Self::lazy(move |bits| {
            let (alo, ahi) = a.refine_to_bits(bits + 4);
            let (blo, bhi) = b.refine_to_bits(bits + 4);
            let products = [&alo * &blo, &alo * &bhi, &ahi * &blo, &ahi * &bhi];
            let lo = products.iter().min().unwrap().clone();
            let hi = products.iter().max().unwrap().clone();
            (lo, hi)
        })
    }

    pub fn scale(&self, k: &BigRational) -> CertifiedReal {
        self.mul(&CertifiedReal::from_rational(k.clone()))
    }

    /// Multiplicative inverse of a provably nonzero value.
    pub fn inv(&self) -> CertifiedReal {
        if let Some(a) = self.exact() {
            assert!(!a.is_zero(), "inverse of certified zero");
            return Self::from_rational(a.recip());
        }
        let a = self.clone();
        Self::lazy(move |bits| {
            let (lo, hi) = a.refine_to_bits(bits + 4);
            if lo.is_positive() || hi.is_negative() {
                (hi.recip(), lo.recip())
            } else {
                wide_bracket()
            }
        })
    }

    pub fn div(&self, other: &CertifiedReal) -> CertifiedReal {
        self.mul(&other.inv())
    }

    /// Natural logarithm of a provably positive value.
    pub fn ln(&self) -> CertifiedReal {
        let a = self.clone();
        Self::lazy(move |bits| {
            let (lo, hi) = a.refine_to_bits(bits + 4);
            assert!(
                hi.is_positive(),
                "logarithm of a certified non-positive value (bracket hi = {hi})"
            );
            if !lo.is_positive() {
                return wide_bracket();
            }
            let (l, _) = dyadic::ln_brackets(&lo, bits);
            let (_, h) = dyadic::ln_brackets(&hi, bits);
            (l, h)
        })
    }

    pub fn exp(&self) -> CertifiedReal {
        let a = self.clone();
        Self::lazy(move |bits| {
            let (lo, hi) = a.refine_to_bits(bits + 4);
            let (l, _) = dyadic::exp_brackets(&lo, bits);
            let (_, h) = dyadic::exp_brackets(&hi, bits);
            (l, h)
        })
    }

    /// Square root of a provably non-negative value. A bracket that dips
    /// below zero (roundoff on a tiny value) is clamped at zero.
    pub fn sqrt(&self) -> CertifiedReal {
        let a = self.clone();
        Self::lazy(move |bits| {
            let (lo, hi) = a.refine_to_bits(bits + 4);
            assert!(
                !hi.is_negative(),
                "square root of a certified negative value (bracket hi = {hi})"
            );
            let lo = if lo.is_negative() { BigRational::zero() } else { lo };
            let (l, _) = dyadic::sqrt_brackets(&lo, bits);
            let (_, h) = dyadic::sqrt_brackets(&hi, bits);
            (l, h)
        })
    }

    /// Inverse hyperbolic cosine of a value that is provably `>= 1`.
    pub fn arccosh(&self) -> CertifiedReal {
        let a = self.clone();
        Self::lazy(move |bits| {
            let (lo, hi) = a.refine_to_bits(bits + 4);
            assert!(
                hi >= BigRational::one(),
                "arccosh of a certified value below 1 (bracket hi = {hi})"
            );
            dyadic::arccosh_brackets(&lo, &hi, bits)
        })
    }

    /// Sums an iterator of certified values.
    pub fn sum<'a>(values: impl IntoIterator<Item = &'a CertifiedReal>) -> CertifiedReal {
        let mut acc = CertifiedReal::zero();
        for v in values {
            acc = acc.add(v);
        }
        acc
    }
}

/// The constant pi as a certified real.
pub fn certified_pi() -> CertifiedReal {
    CertifiedReal::lazy(dyadic::pi_brackets)
}

impl fmt::Debug for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.bracket();
        write!(
            f,
            "CertifiedReal[{}, {}]",
            rational_to_f64(&lo),
            rational_to_f64(&hi)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn assert_encloses(x: &CertifiedReal, v: f64, eps_num: i64, eps_den: i64) {
        let (lo, hi) = x.refine_until(&rat(eps_num, eps_den));
        assert!(rational_to_f64(&lo) <= v + 1e-13, "lo {} vs {v}", rational_to_f64(&lo));
        assert!(rational_to_f64(&hi) >= v - 1e-13, "hi {} vs {v}", rational_to_f64(&hi));
    }

    #[test]
    fn exact_shortcircuit() {
        let a = CertifiedReal::from_rational(rat(1, 3));
        let b = CertifiedReal::from_rational(rat(1, 6));
        let s = a.add(&b);
        assert_eq!(s.exact(), Some(rat(1, 2)));
        let p = a.mul(&b);
        assert_eq!(p.exact(), Some(rat(1, 18)));
    }

    #[test]
    fn ln_and_exp_enclose() {
        let two = CertifiedReal::from_int(2);
        assert_encloses(&two.ln(), std::f64::consts::LN_2, 1, 1_000_000_000_000);
        let e = CertifiedReal::from_int(1).exp();
        assert_encloses(&e, std::f64::consts::E, 1, 1_000_000_000_000);
        let roundtrip = CertifiedReal::from_int(5).ln().exp();
        assert_encloses(&roundtrip, 5.0, 1, 1_000_000_000);
    }

    #[test]
    fn composite_constant() {
        // (1/4) ln 45 + (1/2) ln(3/4 + sqrt(1/2)) = 1.1398920289021776...
        let quarter_ln45 = CertifiedReal::from_int(45).ln().scale(&rat(1, 4));
        let inner = CertifiedReal::from_rational(rat(1, 2))
            .sqrt()
            .add(&CertifiedReal::from_rational(rat(3, 4)));
        let c0 = quarter_ln45.add(&inner.ln().scale(&rat(1, 2)));
        let (lo, hi) = c0.refine_until(&rat(1, 1_000_000_000_000));
        let v = 1.139_892_028_902_177_6;
        assert!(rational_to_f64(&lo) <= v && v <= rational_to_f64(&hi));
        assert!(rational_to_f64(&(hi - lo)) <= 1e-12);
    }

    #[test]
    fn arccosh_value() {
        // arccosh(7/2) = ln((7 + 3 sqrt 5)/2) = 1.9248473002384139...
        let x = CertifiedReal::from_rational(rat(7, 2)).arccosh();
        assert_encloses(&x, 1.924_847_300_238_413_9, 1, 1_000_000_000_000);
    }

    #[test]
    fn surd_source() {
        let lambda = QuadraticSurd::new(3, -1, 5, 2).unwrap();
        let x = CertifiedReal::from_surd(&lambda);
        assert_encloses(&x, (3.0 - 5f64.sqrt()) / 2.0, 1, 1_000_000_000_000);
    }

    #[test]
    fn comparisons() {
        let ln2 = CertifiedReal::from_int(2).ln();
        let below = CertifiedReal::from_rational(rat(693_147, 1_000_000));
        let above = CertifiedReal::from_rational(rat(693_148, 1_000_000));
        assert_eq!(ln2.try_cmp(&below, 4096), Some(Ordering::Greater));
        assert_eq!(ln2.try_cmp(&above, 4096), Some(Ordering::Less));
        // ln 4 and 2 ln 2 are equal; the comparison must give up, not lie.
        let ln4 = CertifiedReal::from_int(4).ln();
        let twice = ln2.add(&ln2);
        assert_eq!(ln4.try_cmp(&twice, 1024), None);
    }

    #[test]
    fn division_and_sign() {
        let x = CertifiedReal::from_int(10).ln().div(&CertifiedReal::from_int(2).ln());
        // log2(10) = 3.3219280948873623
        assert_encloses(&x, 3.321_928_094_887_362_3, 1, 1_000_000_000);
        assert_eq!(x.try_sign(1024), Some(1));
        assert_eq!(CertifiedReal::zero().try_sign(64), Some(0));
    }

    #[test]
    fn decimal_bounds() {
        let ln2 = CertifiedReal::from_int(2).ln();
        let eps = rat(1, 10_000_000_000);
        let lo = ln2.decimal_lo(8, &eps);
        let hi = ln2.decimal_hi(8, &eps);
        assert!(lo.as_str() <= "0.69314718" && "0.69314718" <= hi.as_str(), "{lo} {hi}");
        assert!(lo.parse::<f64>().unwrap() <= std::f64::consts::LN_2);
        assert!(hi.parse::<f64>().unwrap() >= std::f64::consts::LN_2);
    }

    #[test]
    fn monotone_shrinking() {
        let x = CertifiedReal::from_int(3).ln();
        let (lo1, hi1) = x.refine_to_bits(32);
        let (lo2, hi2) = x.refine_to_bits(128);
        assert!(lo2 >= lo1 && hi2 <= hi1);
        assert!(hi2 - lo2 < hi1 - lo1);
    }
}
