//! Scalar abstraction: every numeric routine in this crate is generic over
//! [`Real`], implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar used throughout the toolkit.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Default
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("literal representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wraps an angle into the half-open interval `(-pi, pi]`.
pub fn wrap_angle<T: Real>(angle: T) -> T {
    let two_pi = T::TAU();
    let mut wrapped = angle - two_pi * ((angle + T::PI()) / two_pi).floor();
    if wrapped <= -T::PI() {
        wrapped = wrapped + two_pi;
    }
    wrapped
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_angle_stays_in_half_open_interval() {
        for k in -20..=20 {
            let angle = 0.37 + (k as f64) * std::f64::consts::PI;
            let w = wrap_angle(angle);
            assert!(w > -std::f64::consts::PI && w <= std::f64::consts::PI, "{w}");
            // Same direction modulo a full turn.
            assert!(((angle - w) / std::f64::consts::TAU).fract().abs() < 1e-9);
        }
    }

    #[test]
    fn wrap_angle_maps_pi_to_pi() {
        assert_eq!(wrap_angle(std::f64::consts::PI), std::f64::consts::PI);
        assert_eq!(wrap_angle(-std::f64::consts::PI), std::f64::consts::PI);
    }
}
