//! Scalar abstraction for the signal-processing kernels.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point type the DSP kernels are generic over (`f32` or `f64`).
///
/// Random numbers, calibration constants and statistics are always produced in
/// `f64` and narrowed with [`Scalar::lit`] at the point of use.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `exp(i·theta)` with the angle evaluated in `f64` before narrowing.
#[inline]
pub fn cis<T: Scalar>(theta: f64) -> Complex<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(T::lit(c), T::lit(s))
}
