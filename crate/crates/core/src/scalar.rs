use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumCast};
use rustfft::FftNum;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point sample type: `f32` or `f64`.
pub trait Scalar:
    Float + FftNum + FromPrimitive + Debug + Display + Serialize + DeserializeOwned + Default
{
    /// Converts an `f64` literal or computed value into `Self`.
    fn of(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("f64 is representable in every Scalar")
    }

    /// Shortest text that parses back to the same value, using an exponent
    /// for very large or small magnitudes.
    fn render(self) -> String {
        format!("{self:?}")
    }

    fn as_f64(self) -> f64 {
        <f64 as NumCast>::from(self).expect("Scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub(crate) fn all_finite<T: Scalar>(xs: &[T]) -> bool {
    xs.iter().all(|x| x.is_finite())
}
