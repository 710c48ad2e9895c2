//! Scalar abstraction for the model's numerics.
//!
//! Everything in this crate is written against [`Real`] so the same code runs
//! at `f32` or `f64`. Concrete aliases at the crate root fix `f64` as the
//! default scalar. Solver tolerances default to `f64`-appropriate values;
//! loosen them when instantiating at `f32`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("literal not representable in scalar type")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_convert() {
        assert_eq!(lit::<f64>(0.5), 0.5);
        assert_eq!(lit::<f32>(0.25), 0.25f32);
    }
}
