//! Shared fixtures for the benchmark suite.

use hurwitz_core::{BinaryForm, QuadraticSurd};
use num_bigint::BigInt;
use num_rational::BigRational;

/// The reduced form whose geodesic joins `(3 - sqrt 5)/2` to `(3 + sqrt 5)/2`.
pub fn golden_form() -> BinaryForm {
    let a = QuadraticSurd::new(3, 1, 5, 2).unwrap();
    let b = QuadraticSurd::from_int(-1);
    let c = QuadraticSurd::new(5, -3, 5, 10).unwrap();
    let d = QuadraticSurd::new(0, 1, 5, 5).unwrap();
    BinaryForm::from_coefficients(&a, &b, &c, &d).unwrap()
}

/// A form two reduction steps away from the cycle of [`golden_form`].
pub fn two_step_form() -> BinaryForm {
    let a = QuadraticSurd::new(233, 1, 5, 82).unwrap();
    let b = QuadraticSurd::from_int(-1);
    let c = QuadraticSurd::new(5, -233, 5, 10).unwrap();
    let d = QuadraticSurd::new(0, 41, 5, 5).unwrap();
    BinaryForm::from_coefficients(&a, &b, &c, &d).unwrap()
}

/// The golden-type fixed point `(3 + sqrt 5)/2`.
pub fn golden_value() -> QuadraticSurd {
    QuadraticSurd::new(3, 1, 5, 2).unwrap()
}

/// The constant `mu = (23 - 3 sqrt 5)/22`.
pub fn mu_value() -> QuadraticSurd {
    QuadraticSurd::new(23, -3, 5, 22).unwrap()
}

/// An exact rational from an integer pair.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
