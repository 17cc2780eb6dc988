//! Scalar abstraction: every float-valued kernel in this crate is generic
//! over the working precision, instantiated as `f64` by the crate-root
//! aliases and as `f32` in a handful of smoke tests.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + FftNum
{
    /// Lossless-enough conversion from f64 for tabulated constants.
    fn from_f64_c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 -> scalar conversion")
    }

    fn from_usize_c(n: usize) -> Self {
        Self::from_usize(n).expect("usize -> scalar conversion")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// e(t) = exp(2 pi i t).
pub fn unit_phase<T: Scalar>(t: T) -> Complex<T> {
    let two_pi = T::PI() + T::PI();
    Complex::new((two_pi * t).cos(), (two_pi * t).sin())
}
