//! Scalar abstraction shared by every numerical kernel in the crate.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point type the solvers are generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` literal into `Self`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    /// Convert a count into `Self`.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    /// Clamp a requested tolerance to something the type can honour.
    #[inline]
    fn tol(requested: f64) -> Self {
        Self::lit(requested).max(Self::epsilon() * Self::lit(64.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

/// Square root on the branch `arg ∈ (-π/2, π/2]`.
///
/// `Complex::sqrt` returns `-i·√r` for `-r - 0i`; that lies outside the
/// half-open branch, so the sign is flipped there.
#[inline]
pub fn principal_sqrt<T: Real>(z: C<T>) -> C<T> {
    let s = z.sqrt();
    if s.re == T::zero() && s.im < T::zero() {
        -s
    } else {
        s
    }
}

#[inline]
pub(crate) fn cre<T: Real>(x: T) -> C<T> {
    C::new(x, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_branch_on_negative_axis() {
        let s = principal_sqrt(C::new(-4.0_f64, -0.0));
        assert_eq!(s, C::new(0.0, 2.0));
        let s = principal_sqrt(C::new(-4.0_f64, 0.0));
        assert_eq!(s, C::new(0.0, 2.0));
        let s = principal_sqrt(C::new(3.0_f64, -4.0));
        assert!((s - C::new(2.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn tolerance_floor_for_f32() {
        assert!(f32::tol(1e-12) > 1e-6);
        assert_eq!(f64::tol(1e-12), 1e-12);
    }
}
