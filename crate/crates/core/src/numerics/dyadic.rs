//! Fixed-point bracket evaluation of the handful of transcendental
//! functions the rest of the crate needs: `sqrt`, `ln`, `exp`, `arccosh`,
//! and `pi`.
//!
//! Every function returns a pair `(lo, hi)` of rationals enclosing the
//! true value. Internally values are scaled integers (`value * 2^P`) with
//! floor rounding and a running worst-case error count in units of the
//! last place, so the enclosures are sound, not heuristic. Widths shrink
//! like `2^-bits`; callers that need a specific width retry with more
//! bits rather than relying on a per-call width promise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Guard bits added on top of the caller-requested precision so that
/// series truncation and rounding noise stay below the target width.
const GUARD: u32 = 32;

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

/// Floor division that is exact for both signs (BigInt `/` truncates).
fn floor_div(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_floor(d)
}

/// `[lo, hi]` enclosing `sqrt(x)` for `x >= 0`, with width `<= 2^-bits`.
pub fn sqrt_brackets(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    if x.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    // sqrt(n/d) = sqrt(n*d)/d, so one integer square root suffices.
    let n = x.numer();
    let d = x.denom();
    let m: BigInt = (n * d) << (2 * bits);
    let t = m.sqrt();
    let den = d * pow2(bits);
    if &t * &t == m {
        let exact = BigRational::new(t, den);
        return (exact.clone(), exact);
    }
    (
        BigRational::new(t.clone(), den.clone()),
        BigRational::new(t + 1, den),
    )
}

/// Scaled-integer product of values known to lie in `[-1, 1]`:
/// `floor(a * b / 2^p)`, off by at most one unit in the last place.
fn fxmul(a: &BigInt, b: &BigInt, p: u32) -> BigInt {
    floor_div(&(a * b), &pow2(p))
}

/// `2 * atanh(z)` for rational `0 <= z < 1/2`, as a scaled integer with a
/// two-sided error bound in ulps: the true value lies in
/// `[(s - e_lo)/2^p, (s + e_hi)/2^p]`.
fn atanh2_fixed(z: &BigRational, p: u32) -> (BigInt, u64, u64) {
    debug_assert!(!z.is_negative() && z < &BigRational::new(BigInt::from(1), BigInt::from(2)));
    let scale = pow2(p);
    let zfix = floor_div(&(z.numer() * &scale), z.denom());
    let z2 = fxmul(&zfix, &zfix, p);
    // Errors in ulps; each fixed-point op on values <= 1 adds at most
    // the operand errors plus one.
    let e_z: u64 = 1;
    let e_z2: u64 = 2 * e_z + 1;

    let mut pow = zfix.clone();
    let mut e_pow = e_z;
    let mut sum = zfix;
    let mut e_sum = e_pow;
    let mut odd = BigInt::from(1);
    let tail: u64;
    loop {
        odd += 2;
        pow = fxmul(&pow, &z2, p);
        e_pow += e_z2 + 1;
        let term = floor_div(&pow, &odd);
        if term.is_zero() {
            // Remaining series tail <= pow_true/odd * 1/(1 - z^2) and
            // z^2 < 1/4, so a factor 4/3 absorbed into +2 covers it.
            tail = e_pow + 4;
            break;
        }
        e_sum += e_pow + 1;
        sum += term;
    }
    (sum << 1, 2 * e_sum, 2 * (e_sum + tail))
}

/// `[lo, hi]` enclosing `ln(2)`.
pub fn ln2_brackets(bits: u32) -> (BigRational, BigRational) {
    let p = bits + GUARD;
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let (s, e_lo, e_hi) = atanh2_fixed(&third, p);
    let den = pow2(p);
    (
        BigRational::new(&s - BigInt::from(e_lo), den.clone()),
        BigRational::new(s + BigInt::from(e_hi), den),
    )
}

/// `[lo, hi]` enclosing `ln(x)` for rational `x > 0`.
pub fn ln_brackets(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(x.is_positive(), "ln of a non-positive rational");
    let p = bits + GUARD;
    // Normalize x = m * 2^k with m in [1, 2).
    let mut k: i64 = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = BigRational::new(BigInt::from(2), BigInt::one());
    let scale_by = |v: i64| -> BigRational {
        if v >= 0 {
            BigRational::new(BigInt::one() << v as u32, BigInt::one())
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-v) as u32)
        }
    };
    let mut m = x * scale_by(-k);
    if m < BigRational::one() {
        k -= 1;
        m = &m * &two;
    } else if m >= two {
        k += 1;
        m = m / &two;
    }
    debug_assert!(m >= BigRational::one() && m < two);

    // ln m = 2 atanh((m-1)/(m+1)), argument in [0, 1/3].
    let z = (&m - BigRational::one()) / (&m + BigRational::one());
    let (s, e_lo, e_hi) = atanh2_fixed(&z, p);
    let (l2_s, l2_lo, l2_hi) = {
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        atanh2_fixed(&third, p)
    };
    let den = pow2(p);
    let kk = BigInt::from(k);
    let (k_lo, k_hi) = if k >= 0 {
        (
            &kk * (&l2_s - BigInt::from(l2_lo)),
            &kk * (&l2_s + BigInt::from(l2_hi)),
        )
    } else {
        (
            &kk * (&l2_s + BigInt::from(l2_hi)),
            &kk * (&l2_s - BigInt::from(l2_lo)),
        )
    };
    (
        BigRational::new(k_lo + (&s - BigInt::from(e_lo)), den.clone()),
        BigRational::new(k_hi + (s + BigInt::from(e_hi)), den),
    )
}

/// `exp(r)` for rational `|r| <= 1`, as a scaled integer with a symmetric
/// error bound in ulps.
fn exp_fixed(r: &BigRational, p: u32) -> (BigInt, u64) {
    debug_assert!(r.abs() <= BigRational::one());
    let scale = pow2(p);
    let rfix = floor_div(&(r.numer() * &scale), r.denom());
    let e_r: u64 = 1;
    let mut term = scale.clone();
    let mut e_term: u64 = 0;
    let mut sum = scale;
    let mut e_sum: u64 = 0;
    let mut n = BigInt::zero();
    loop {
        n += 1;
        term = fxmul(&term, &rfix, p);
        e_term += e_r + 1;
        term = floor_div(&term, &n);
        e_term += 1;
        if term.is_zero() {
            // |tail| <= 2 * |next true term| once terms shrink below an ulp.
            e_sum += e_term + 4;
            break;
        }
        sum += &term;
        e_sum += e_term;
    }
    (sum, e_sum)
}

/// `[lo, hi]` enclosing `exp(x)` for rational `x`.
pub fn exp_brackets(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let p = bits + GUARD;
    let (l2_lo, l2_hi) = ln2_brackets(p);
    // k = nearest integer to x / ln 2; a rough quotient is fine because
    // the remainder bracket below is computed with directed endpoints.
    let k_est = {
        let q = x / &l2_lo;
        let twice = q.numer() * BigInt::from(2) + q.denom();
        floor_div(&twice, &(q.denom() * BigInt::from(2)))
    };
    let k: i64 = i64::try_from(&k_est).expect("exp argument out of supported range");
    let kk = BigInt::from(k);
    // r = x - k ln 2 lies in an interval with rational endpoints.
    let (r_lo, r_hi) = if k >= 0 {
        (x - &l2_hi * &kk, x - &l2_lo * &kk)
    } else {
        (x - &l2_lo * &kk, x - &l2_hi * &kk)
    };
    debug_assert!(r_lo.abs() <= BigRational::one() && r_hi.abs() <= BigRational::one());
    let den = pow2(p);
    let (s_lo, e_lo) = exp_fixed(&r_lo, p);
    let (s_hi, e_hi) = exp_fixed(&r_hi, p);
    let mut lo = BigRational::new(s_lo - BigInt::from(e_lo), den.clone());
    let hi = BigRational::new(s_hi + BigInt::from(e_hi), den);
    if lo.is_negative() {
        lo = BigRational::zero();
    }
    let two_k = if k >= 0 {
        BigRational::new(BigInt::one() << k as u32, BigInt::one())
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-k) as u32)
    };
    (lo * &two_k, hi * two_k)
}

/// `[lo, hi]` enclosing `arccosh(y)` for all `y` in `[xlo, xhi]`,
/// `xhi >= 1`. The lower endpoint is clamped to 1, where arccosh is 0.
pub fn arccosh_brackets(
    xlo: &BigRational,
    xhi: &BigRational,
    bits: u32,
) -> (BigRational, BigRational) {
    let one = BigRational::one();
    assert!(xhi >= &one, "arccosh argument below 1");
    let xlo = if xlo < &one { &one } else { xlo };
    let lo = {
        let t = xlo * xlo - &one;
        let (s, _) = sqrt_brackets(&t, bits + GUARD);
        let v = xlo + s;
        if v <= one {
            BigRational::zero()
        } else {
            ln_brackets(&v, bits).0
        }
    };
    let hi = {
        let t = xhi * xhi - &one;
        let (_, s) = sqrt_brackets(&t, bits + GUARD);
        ln_brackets(&(xhi + s), bits).1
    };
    (lo, hi)
}

/// `atan(1/n)` as a scaled integer with error bound in ulps.
fn atan_inv_fixed(n: u32, p: u32) -> (BigInt, u64) {
    let scale = pow2(p);
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let mut pw = floor_div(&scale, &n);
    let mut e_pw: u64 = 1;
    let mut sum = pw.clone();
    let mut e_sum = e_pw;
    let mut odd = BigInt::one();
    let mut subtract = true;
    loop {
        odd += 2;
        pw = floor_div(&pw, &n2);
        e_pw += 1;
        let term = floor_div(&pw, &odd);
        if term.is_zero() {
            // Alternating series: the dropped tail is below one ulp plus
            // accumulated rounding.
            e_sum += e_pw + 2;
            break;
        }
        if subtract {
            sum -= term;
        } else {
            sum += term;
        }
        e_sum += e_pw + 1;
        subtract = !subtract;
    }
    (sum, e_sum)
}

/// `[lo, hi]` enclosing pi, via Machin's formula.
pub fn pi_brackets(bits: u32) -> (BigRational, BigRational) {
    let p = bits + GUARD;
    let (a5, e5) = atan_inv_fixed(5, p);
    let (a239, e239) = atan_inv_fixed(239, p);
    let s = &a5 * BigInt::from(16) - &a239 * BigInt::from(4);
    let e = BigInt::from(16 * e5 + 4 * e239);
    let den = pow2(p);
    (
        BigRational::new(&s - &e, den.clone()),
        BigRational::new(s + e, den),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn assert_encloses(lo: &BigRational, hi: &BigRational, target: f64, width: f64) {
        let lo_f = crate::numerics::rational_to_f64(lo);
        let hi_f = crate::numerics::rational_to_f64(hi);
        assert!(lo_f <= target + 1e-15, "lo {lo_f} above target {target}");
        assert!(hi_f >= target - 1e-15, "hi {hi_f} below target {target}");
        assert!(hi_f - lo_f <= width, "bracket too wide: {}", hi_f - lo_f);
    }

    #[test]
    fn sqrt_two() {
        let (lo, hi) = sqrt_brackets(&rat(2, 1), 80);
        assert_encloses(&lo, &hi, std::f64::consts::SQRT_2, 1e-20);
    }

    #[test]
    fn sqrt_exact_square() {
        let (lo, hi) = sqrt_brackets(&rat(9, 4), 40);
        assert_eq!(lo, hi);
        assert_eq!(lo, rat(3, 2));
    }

    #[test]
    fn ln_two() {
        let (lo, hi) = ln2_brackets(100);
        assert_encloses(&lo, &hi, std::f64::consts::LN_2, 1e-25);
    }

    #[test]
    fn ln_various() {
        for (n, d, target) in [
            (1i64, 1i64, 0.0),
            (10, 1, 10f64.ln()),
            (1, 3, (1f64 / 3.0).ln()),
            (5, 3, (5f64 / 3.0).ln()),
            (45, 1, 45f64.ln()),
        ] {
            let (lo, hi) = ln_brackets(&rat(n, d), 90);
            assert_encloses(&lo, &hi, target, 1e-20);
        }
    }

    #[test]
    fn exp_various() {
        for (n, d) in [(0i64, 1i64), (1, 1), (-1, 1), (3, 2), (-7, 3), (20, 1), (-15, 2)] {
            let x = rat(n, d);
            let target = (n as f64 / d as f64).exp();
            let (lo, hi) = exp_brackets(&x, 90);
            assert_encloses(&lo, &hi, target, target.abs() * 1e-18 + 1e-20);
        }
    }

    #[test]
    fn exp_ln_roundtrip() {
        let x = rat(7, 2);
        let (llo, lhi) = ln_brackets(&x, 120);
        let (elo, _) = exp_brackets(&llo, 120);
        let (_, ehi) = exp_brackets(&lhi, 120);
        assert!(elo <= x && x <= ehi);
    }

    #[test]
    fn arccosh_values() {
        // arccosh(3) = ln(3 + 2 sqrt 2)
        let (lo, hi) = arccosh_brackets(&rat(3, 1), &rat(3, 1), 90);
        let target = (3f64 + 2.0 * std::f64::consts::SQRT_2).ln();
        assert_encloses(&lo, &hi, target, 1e-20);
        // arccosh(1) = 0
        let (lo, hi) = arccosh_brackets(&rat(1, 1), &rat(1, 1), 60);
        assert!(!lo.is_positive() || lo.is_zero());
        assert!(crate::numerics::rational_to_f64(&hi) < 1e-15);
    }

    #[test]
    fn pi_value() {
        let (lo, hi) = pi_brackets(110);
        assert_encloses(&lo, &hi, std::f64::consts::PI, 1e-28);
    }
}
