//! Floating point abstraction for the solver core.

use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive};
use rustfft::FftNum;

/// Scalar type of all field data: `f32` or `f64`.
///
/// Everything in this crate is generic over `Scalar`; the crate root exports
/// `f64` aliases for the common case. Double precision is required for the
/// rate-fitting experiments, which need several clean decades of dynamic
/// range.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + FftNum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
{
    /// Convert an `f64` constant, panicking only for non-finite inputs.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + FftNum
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_widths_implement_scalar() {
        fn takes_scalar<T: Scalar>(x: T) -> T {
            x + T::lit(1.0)
        }
        assert_eq!(takes_scalar(1.0f64), 2.0);
        assert_eq!(takes_scalar(1.0f32), 2.0);
    }
}
