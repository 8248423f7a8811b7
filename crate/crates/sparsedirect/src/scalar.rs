use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{Float, FromPrimitive, Num, Signed};

/// Ring-level scalar: enough for storage, conversion, permutation and exact
/// matrix-vector arithmetic. `f32`/`f64` and `num_rational::Ratio<i64>` all
/// qualify, so the exact-fraction test oracles reuse the same types.
pub trait Scalar:
    Num + Signed + Neg<Output = Self> + Copy + PartialOrd + Debug + Display + FromPrimitive + 'static
{
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("scalar conversion from usize")
    }
}

impl<T> Scalar for T where
    T: Num
        + Signed
        + Neg<Output = T>
        + Copy
        + PartialOrd
        + Debug
        + Display
        + FromPrimitive
        + 'static
{
}

/// Field scalar with the floating-point operations the numeric
/// factorizations need (abs, sqrt, comparisons against a tolerance).
pub trait Real: Scalar + Float {
    const DEFAULT_PIVOT_EPS: Self;
}

impl Real for f64 {
    const DEFAULT_PIVOT_EPS: Self = 1e-12;
}

impl Real for f32 {
    const DEFAULT_PIVOT_EPS: Self = 1e-5;
}
