pub mod algebra;
pub mod character;
pub mod error;
pub mod experiments;
pub mod family;
pub mod lfunction;
pub mod num;
pub mod prediction;
pub mod series;

pub use error::{Error, Result};

// f64 and f32 shorthands for the generic numeric types
pub type XPoly = series::XPoly<f64>;
pub type XPolyF32 = series::XPoly<f32>;
pub type Jet = series::MultiSeries<f64>;
pub type JetF32 = series::MultiSeries<f32>;
pub type EulerValue = prediction::EulerProductValue<f64>;
pub type EulerValueF32 = prediction::EulerProductValue<f32>;
pub type QkPoly = prediction::QkPolynomial<f64>;
pub type QkPolyF32 = prediction::QkPolynomial<f32>;
pub type Rational = num_rational::BigRational;
