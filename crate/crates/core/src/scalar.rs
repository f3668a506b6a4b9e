use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Numeric type the probability and bound arithmetic is written against.
///
/// Implemented for `f32`, `f64` and exact rationals. Everything that does not
/// need transcendental functions (marginals, correlators, the J functional,
/// closed-form bounds) is generic over it, so witnesses and breakpoints can be
/// certified with exact arithmetic.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + PartialOrd
        + Num
        + Signed
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Arbitrary-precision rational used for exact checks.
pub type Rational = Ratio<BigInt>;

/// `num / den` in `T`.
pub fn frac<T: Scalar>(num: i64, den: i64) -> T {
    T::from_i64(num).expect("integer fits scalar") / T::from_i64(den).expect("integer fits scalar")
}

pub fn int<T: Scalar>(n: i64) -> T {
    T::from_i64(n).expect("integer fits scalar")
}

/// Converts an `f64` constant (tolerances, user input) into `T`.
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite literal")
}

pub fn to_f64<T: Scalar>(x: &T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn min2<T: Scalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

pub fn max2<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

pub fn min_of<T: Scalar, I: IntoIterator<Item = T>>(items: I) -> Option<T> {
    items.into_iter().reduce(min2)
}

pub fn max_of<T: Scalar, I: IntoIterator<Item = T>>(items: I) -> Option<T> {
    items.into_iter().reduce(max2)
}

/// `|a - b| <= tol`.
pub fn close<T: Scalar>(a: &T, b: &T, tol: &T) -> bool {
    (a.clone() - b.clone()).abs() <= *tol
}
