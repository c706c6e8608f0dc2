use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used by evaluation and the numerical back end.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lossy conversion from `f64` literals and tolerances.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(Self::nan)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
