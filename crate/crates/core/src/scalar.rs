//! Scalar abstraction shared by the network and loss code.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Floating point type usable as a network parameter or margin.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn half() -> Self {
        Self::from_f64_lossy(0.5)
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sign with the convention sgn(0) = +1.
#[inline]
pub fn sgn<T: Scalar>(t: T) -> T {
    if t >= T::zero() {
        T::one()
    } else {
        -T::one()
    }
}

/// `1 ∧ β`.
#[inline]
pub fn min1(beta: f64) -> f64 {
    beta.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_zero_is_positive() {
        assert_eq!(sgn(0.0f64), 1.0);
        assert_eq!(sgn(-0.0f32), 1.0);
        assert_eq!(sgn(-1e-300f64), -1.0);
    }

    #[test]
    fn lossy_conversions() {
        assert_eq!(<f32 as Scalar>::from_f64_lossy(0.25), 0.25f32);
        assert_eq!(2.5f32.to_f64_lossy(), 2.5);
        assert_eq!(<f64 as Scalar>::two(), 2.0);
    }
}
