//! Binary quadratic forms as products of two linear forms, the integer
//! matrix action on them, and reduction to the H-reduced position.
//!
//! A form is carried by a matrix `g = [[a, -c], [-b, d]]` of determinant
//! one: `Q(x, y) = (ay + bx)(cy + dx)` is the standard form `Q0(x,y) = xy`
//! pulled back through `g`. The two vanishing directions of `Q` map to
//! the endpoints `u = g(0)` and `w = g(infinity)`, and reduction walks the
//! endpoints with the moves `z -> -1/(z - a)` driven by the minus-CF
//! digits of `w` until `|w| > 2` and `sgn(w) u` lands in `[lambda-1,
//! lambda]` with `lambda = (3 - sqrt 5)/2`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::numerics::{
    CertifiedReal, ProjectivePoint, QuadraticSurd, UnimodularMatrix,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("matrix determinant is {0}, expected exactly 1")]
    NotUnimodular(QuadraticSurd),
    #[error("coefficient b must be nonzero")]
    ZeroB,
    #[error("endpoints coincide")]
    EqualEndpoints,
    #[error("attracting endpoint is at infinity")]
    EndpointAtInfinity,
    #[error("attracting endpoint reached an exact pole after digits {digits:?}")]
    RationalTermination { digits: Vec<i64> },
    #[error("reduction did not finish within {limit} steps (partial digits {digits:?})")]
    ReductionBudget { limit: usize, digits: Vec<i64> },
    #[error("digit at reduction step {0} does not fit in 64 bits")]
    DigitOverflow(usize),
}

/// A 2x2 matrix of quadratic surds with determinant exactly one.
#[derive(Clone, PartialEq, Eq)]
pub struct RealMatrix {
    e: [[QuadraticSurd; 2]; 2],
}

impl RealMatrix {
    pub fn new(
        m11: QuadraticSurd,
        m12: QuadraticSurd,
        m21: QuadraticSurd,
        m22: QuadraticSurd,
    ) -> Result<Self, FormError> {
        let det = &(&m11 * &m22) - &(&m12 * &m21);
        if det != QuadraticSurd::one() {
            return Err(FormError::NotUnimodular(det));
        }
        Ok(RealMatrix {
            e: [[m11, m12], [m21, m22]],
        })
    }

    pub fn identity() -> Self {
        RealMatrix {
            e: [
                [QuadraticSurd::one(), QuadraticSurd::zero()],
                [QuadraticSurd::zero(), QuadraticSurd::one()],
            ],
        }
    }

    pub fn from_unimodular(m: &UnimodularMatrix) -> Result<Self, FormError> {
        let (a, b, c, d) = m.entries();
        RealMatrix::new(
            QuadraticSurd::from_int(a.clone()),
            QuadraticSurd::from_int(b.clone()),
            QuadraticSurd::from_int(c.clone()),
            QuadraticSurd::from_int(d.clone()),
        )
    }

    pub fn entry(&self, i: usize, j: usize) -> &QuadraticSurd {
        &self.e[i][j]
    }

    pub fn mul(&self, rhs: &RealMatrix) -> RealMatrix {
        let p = |i: usize, j: usize| {
            &(&self.e[i][0] * &rhs.e[0][j]) + &(&self.e[i][1] * &rhs.e[1][j])
        };
        RealMatrix {
            e: [[p(0, 0), p(0, 1)], [p(1, 0), p(1, 1)]],
        }
    }

    pub fn inverse(&self) -> RealMatrix {
        RealMatrix {
            e: [
                [self.e[1][1].clone(), -self.e[0][1].clone()],
                [-self.e[1][0].clone(), self.e[0][0].clone()],
            ],
        }
    }

    /// Applies the matrix to a column vector of surds.
    pub fn apply(&self, x: &QuadraticSurd, y: &QuadraticSurd) -> (QuadraticSurd, QuadraticSurd) {
        (
            &(&self.e[0][0] * x) + &(&self.e[0][1] * y),
            &(&self.e[1][0] * x) + &(&self.e[1][1] * y),
        )
    }

    /// Fractional linear action on the projective line.
    pub fn mobius(&self, z: &ProjectivePoint) -> ProjectivePoint {
        match z {
            ProjectivePoint::Infinity => {
                if self.e[1][0].is_zero() {
                    ProjectivePoint::Infinity
                } else {
                    ProjectivePoint::Finite(&self.e[0][0] / &self.e[1][0])
                }
            }
            ProjectivePoint::Finite(z) => {
                let den = &(&self.e[1][0] * z) + &self.e[1][1];
                if den.is_zero() {
                    ProjectivePoint::Infinity
                } else {
                    ProjectivePoint::Finite(&(&(&self.e[0][0] * z) + &self.e[0][1]) / &den)
                }
            }
        }
    }
}

impl fmt::Debug for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.e[0][0], self.e[0][1], self.e[1][0], self.e[1][1]
        )
    }
}

/// `lambda = (3 - sqrt 5)/2`, the right edge of the reduced window for
/// `sgn(w) u`; the window itself is `[lambda - 1, lambda]`.
pub fn lambda() -> QuadraticSurd {
    QuadraticSurd::new(3, -1, 5, 2).unwrap()
}

/// A binary quadratic form `Q(x,y) = (ay + bx)(cy + dx)` with `ad - bc = 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryForm {
    g: RealMatrix,
}

impl BinaryForm {
    /// Builds the form from the factor coefficients. `b` must be nonzero
    /// (forms with `b = 0` exist but have their first vanishing direction
    /// at infinity; construct those through [`BinaryForm::from_matrix`]).
    pub fn from_coefficients(
        a: QuadraticSurd,
        b: QuadraticSurd,
        c: QuadraticSurd,
        d: QuadraticSurd,
    ) -> Result<Self, FormError> {
        if b.is_zero() {
            return Err(FormError::ZeroB);
        }
        let g = RealMatrix::new(a, -c, -b, d)?;
        Ok(BinaryForm { g })
    }

    /// Wraps a determinant-one matrix as the pullback form `Q0(g^{-1} v)`.
    pub fn from_matrix(g: RealMatrix) -> Self {
        BinaryForm { g }
    }

    /// The form whose geodesic runs from `u` to `w`; both finite, distinct.
    pub fn from_endpoints(u: &QuadraticSurd, w: &QuadraticSurd) -> Result<Self, FormError> {
        let span = w - u;
        if span.is_zero() {
            return Err(FormError::EqualEndpoints);
        }
        let inv = span.inv();
        let g = RealMatrix::new(w.clone(), &*u * &inv, QuadraticSurd::one(), inv.clone())?;
        Ok(BinaryForm { g })
    }

    /// The standard form `Q0(x, y) = xy` with endpoints `(0, infinity)`.
    pub fn standard() -> Self {
        BinaryForm {
            g: RealMatrix::identity(),
        }
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.g
    }

    /// Factor coefficients `(a, b, c, d)`: `L+ = ay + bx`, `L- = cy + dx`.
    pub fn coefficients(&self) -> (QuadraticSurd, QuadraticSurd, QuadraticSurd, QuadraticSurd) {
        (
            self.g.entry(0, 0).clone(),
            -self.g.entry(1, 0).clone(),
            -self.g.entry(0, 1).clone(),
            self.g.entry(1, 1).clone(),
        )
    }

    pub fn linear_plus(&self, x: &BigInt, y: &BigInt) -> QuadraticSurd {
        let (a, b, _, _) = self.coefficients();
        &(&a * &QuadraticSurd::from_int(y.clone())) + &(&b * &QuadraticSurd::from_int(x.clone()))
    }

    pub fn linear_minus(&self, x: &BigInt, y: &BigInt) -> QuadraticSurd {
        let (_, _, c, d) = self.coefficients();
        &(&c * &QuadraticSurd::from_int(y.clone())) + &(&d * &QuadraticSurd::from_int(x.clone()))
    }

    /// Exact value `Q(x, y)`.
    pub fn evaluate(&self, x: &BigInt, y: &BigInt) -> QuadraticSurd {
        &self.linear_plus(x, y) * &self.linear_minus(x, y)
    }

    pub fn evaluate_i64(&self, x: i64, y: i64) -> QuadraticSurd {
        self.evaluate(&BigInt::from(x), &BigInt::from(y))
    }

    /// `Q` at a real (certified) point.
    pub fn evaluate_real(&self, x: &CertifiedReal, y: &CertifiedReal) -> CertifiedReal {
        let (a, b, c, d) = self.coefficients();
        let plus = CertifiedReal::from_surd(&a)
            .mul(y)
            .add(&CertifiedReal::from_surd(&b).mul(x));
        let minus = CertifiedReal::from_surd(&c)
            .mul(y)
            .add(&CertifiedReal::from_surd(&d).mul(x));
        plus.mul(&minus)
    }

    /// Endpoints `(u, w) = (g(0), g(infinity))` of the form's geodesic.
    pub fn endpoints(&self) -> (ProjectivePoint, ProjectivePoint) {
        let u = self.g.mobius(&ProjectivePoint::Finite(QuadraticSurd::zero()));
        let w = self.g.mobius(&ProjectivePoint::Infinity);
        (u, w)
    }

    /// The form pulled back by an integer matrix: `Q'(v) = Q0((mg)^{-1} v)`,
    /// satisfying `Q'(m p) = Q(p)`.
    pub fn transformed(&self, m: &UnimodularMatrix) -> Result<BinaryForm, FormError> {
        let real = RealMatrix::from_unimodular(m)?;
        Ok(BinaryForm {
            g: real.mul(&self.g),
        })
    }

    pub fn is_h_reduced(&self) -> bool {
        let (u, w) = self.endpoints();
        match (u, w) {
            (ProjectivePoint::Finite(u), ProjectivePoint::Finite(w)) => is_h_reduced(&u, &w),
            _ => false,
        }
    }
}

impl fmt::Debug for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, c, d) = self.coefficients();
        write!(f, "form(a={a}, b={b}, c={c}, d={d})")
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, c, d) = self.coefficients();
        write!(f, "form(a={a}, b={b}, c={c}, d={d})")
    }
}

/// The reduced-position predicate on a pair of finite endpoints, decided
/// exactly: `|w| > 2` and `sgn(w) u` in the closed window `[lambda - 1,
/// lambda]`.
pub fn is_h_reduced(u: &QuadraticSurd, w: &QuadraticSurd) -> bool {
    if w.abs().cmp_int(2) != Ordering::Greater {
        return false;
    }
    let signed_u = if w.is_negative() { -u.clone() } else { u.clone() };
    let lam = lambda();
    let low = &lam - &QuadraticSurd::one();
    signed_u.cmp_value(&low) != Ordering::Less && signed_u.cmp_value(&lam) != Ordering::Greater
}

/// Result of walking a form to its reduced position.
#[derive(Debug, Clone)]
pub struct Reduction {
    /// The integer word, product of the digit moves applied (left-most is
    /// the last move).
    pub word: UnimodularMatrix,
    /// Digits consumed from the attracting endpoint, in application order.
    pub digits: Vec<i64>,
    /// The reduced form `Q' = Q0 ((word * g)^{-1} v)`.
    pub form: BinaryForm,
    pub steps: usize,
}

pub const DEFAULT_REDUCTION_BUDGET: usize = 10_000;

/// Walks the endpoint pair with `z -> -1/(z - a)`, `a` the digit of the
/// attracting endpoint, until the reduced predicate holds.
pub fn h_reduce(form: &BinaryForm, max_steps: usize) -> Result<Reduction, FormError> {
    let (mut u, mut w) = form.endpoints();
    if w.is_infinity() {
        return Err(FormError::EndpointAtInfinity);
    }
    let mut word = UnimodularMatrix::identity();
    let mut digits: Vec<i64> = Vec::new();
    let mut current = form.clone();
    loop {
        let reduced = match (&u, &w) {
            (ProjectivePoint::Finite(uf), ProjectivePoint::Finite(wf)) => is_h_reduced(uf, wf),
            _ => false,
        };
        if reduced {
            return Ok(Reduction {
                word,
                steps: digits.len(),
                digits,
                form: current,
            });
        }
        if digits.len() >= max_steps {
            return Err(FormError::ReductionBudget {
                limit: max_steps,
                digits,
            });
        }
        let wf = match &w {
            ProjectivePoint::Finite(wf) => wf,
            ProjectivePoint::Infinity => {
                return Err(FormError::RationalTermination { digits });
            }
        };
        let a = wf
            .nearest_int()
            .to_i64()
            .ok_or(FormError::DigitOverflow(digits.len()))?;
        let m = UnimodularMatrix::digit_move(a);
        u = m.mobius(&u);
        w = m.mobius(&w);
        word = m.mul(&word);
        digits.push(a);
        current = current.transformed(&m)?;
    }
}

/// Image of a real vector under the form-preserving flow `g a_t g^{-1}`,
/// `a_t = diag(e^{t/2}, e^{-t/2})`.
pub fn flow_image(
    g: &RealMatrix,
    t: &CertifiedReal,
    v: (&QuadraticSurd, &QuadraticSurd),
) -> (CertifiedReal, CertifiedReal) {
    let (w1, w2) = g.inverse().apply(v.0, v.1);
    let half = BigInt::from(2);
    let half_t = t.scale(&num_rational::BigRational::new(BigInt::from(1), half));
    let stretched = half_t.exp().mul(&CertifiedReal::from_surd(&w1));
    let squeezed = half_t.neg().exp().mul(&CertifiedReal::from_surd(&w2));
    let row = |i: usize| {
        CertifiedReal::from_surd(g.entry(i, 0))
            .mul(&stretched)
            .add(&CertifiedReal::from_surd(g.entry(i, 1)).mul(&squeezed))
    };
    (row(0), row(1))
}
