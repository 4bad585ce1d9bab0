//! Integer 2x2 matrices of determinant +-1 and their Moebius action.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::surd::QuadraticSurd;

/// A point of the projective line: a quadratic surd or infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProjectivePoint {
    Finite(QuadraticSurd),
    Infinity,
}

impl ProjectivePoint {
    pub fn finite(&self) -> Option<&QuadraticSurd> {
        match self {
            ProjectivePoint::Finite(x) => Some(x),
            ProjectivePoint::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjectivePoint::Infinity)
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectivePoint::Finite(x) => write!(f, "{x}"),
            ProjectivePoint::Infinity => write!(f, "inf"),
        }
    }
}

impl From<QuadraticSurd> for ProjectivePoint {
    fn from(x: QuadraticSurd) -> Self {
        ProjectivePoint::Finite(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix determinant is {0}, expected +1 or -1")]
    NotUnimodular(BigInt),
}

/// An integer matrix `[[a, b], [c, d]]` with `ad - bc = +-1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UnimodularMatrix {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl UnimodularMatrix {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self, MatrixError> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        let det = &a * &d - &b * &c;
        if det.magnitude().is_one() {
            Ok(UnimodularMatrix { a, b, c, d })
        } else {
            Err(MatrixError::NotUnimodular(det))
        }
    }

    pub fn identity() -> Self {
        UnimodularMatrix {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    /// The map `z -> -1/(z - a)` as a matrix, `[[0, -1], [1, -a]]`.
    pub fn digit_move(a: i64) -> Self {
        UnimodularMatrix {
            a: BigInt::zero(),
            b: BigInt::from(-1),
            c: BigInt::one(),
            d: BigInt::from(-a),
        }
    }

    /// The continued fraction block `[[b, -1], [1, 0]]`, inverse of
    /// `digit_move(b)` up to sign (the same projective map); products of
    /// blocks evaluate expansions.
    pub fn block(b: i64) -> Self {
        UnimodularMatrix {
            a: BigInt::from(b),
            b: BigInt::from(-1),
            c: BigInt::one(),
            d: BigInt::zero(),
        }
    }

    pub fn entries(&self) -> (&BigInt, &BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    pub fn det(&self) -> i8 {
        let det = &self.a * &self.d - &self.b * &self.c;
        if det.is_one() {
            1
        } else {
            -1
        }
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn mul(&self, rhs: &UnimodularMatrix) -> UnimodularMatrix {
        UnimodularMatrix {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }

    pub fn inverse(&self) -> UnimodularMatrix {
        if self.det() == 1 {
            UnimodularMatrix {
                a: self.d.clone(),
                b: -self.b.clone(),
                c: -self.c.clone(),
                d: self.a.clone(),
            }
        } else {
            UnimodularMatrix {
                a: -self.d.clone(),
                b: self.b.clone(),
                c: self.c.clone(),
                d: -self.a.clone(),
            }
        }
    }

    /// Applies the matrix to a column vector.
    pub fn apply_vec(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        (&self.a * x + &self.b * y, &self.c * x + &self.d * y)
    }

    /// Fractional linear action on the projective line.
    pub fn mobius(&self, z: &ProjectivePoint) -> ProjectivePoint {
        match z {
            ProjectivePoint::Infinity => {
                if self.c.is_zero() {
                    ProjectivePoint::Infinity
                } else {
                    let v = QuadraticSurd::new(self.a.clone(), 0, 0, self.c.clone())
                        .expect("nonzero denominator");
                    ProjectivePoint::Finite(v)
                }
            }
            ProjectivePoint::Finite(z) => {
                let a = QuadraticSurd::from_int(self.a.clone());
                let b = QuadraticSurd::from_int(self.b.clone());
                let c = QuadraticSurd::from_int(self.c.clone());
                let d = QuadraticSurd::from_int(self.d.clone());
                let den = &(&c * z) + &d;
                if den.is_zero() {
                    ProjectivePoint::Infinity
                } else {
                    ProjectivePoint::Finite(&(&(&a * z) + &b) / &den)
                }
            }
        }
    }
}

impl fmt::Debug for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}
