//! Scalar abstraction for the floating-point side of the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Convert an f64 literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// log(1 + w) without cancellation for small complex w.
pub fn cln_1p<T: Real>(w: num_complex::Complex<T>) -> num_complex::Complex<T> {
    let two = T::lit(2.0);
    let re = (two * w.re + w.norm_sqr()).ln_1p() / two;
    num_complex::Complex::new(re, w.im.atan2(T::one() + w.re))
}

/// exp(w) - 1 without cancellation for small complex w.
pub fn cexp_m1<T: Real>(w: num_complex::Complex<T>) -> num_complex::Complex<T> {
    let half_sin = (w.im / T::lit(2.0)).sin();
    let cos_m1 = -T::lit(2.0) * half_sin * half_sin;
    let re = w.re.exp_m1() * w.im.cos() + cos_m1;
    num_complex::Complex::new(re, w.re.exp() * w.im.sin())
}
