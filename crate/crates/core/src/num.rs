//! Scalar abstraction shared by the dimensionless solvers.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar the dimensionless machinery is generic over.
///
/// The laboratory-frame model works in SI units where ħ² underflows `f32`, so
/// it stays in `f64` and only hands sampled dimensionless data to this layer.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Default + Display + LowerExp + Debug
{
    /// Converts an `f64` literal. Panics only for values the type cannot hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{iθ}`.
#[inline]
pub(crate) fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Rectangle-rule integral of `|φ|²`, exact for band-limited periodic data.
pub(crate) fn density_sum<T: Real>(amplitudes: &[Complex<T>]) -> T {
    amplitudes.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
}
