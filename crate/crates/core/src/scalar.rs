//! Scalar abstraction underlying all matrix and entropy arithmetic.
//!
//! Every quantity in this crate is computed over a caller-chosen IEEE float
//! type. The crate root exposes `f64` aliases, which is the working precision
//! of the bundled tolerances; `f32` is available for callers that trade
//! accuracy for footprint. Validation slack widens automatically at lower
//! precision (`validation_tol`), while decision thresholds stay pinned.

use core::fmt::{Debug, Display};
use core::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar type over which states, observables, and
/// information measures are generic.
pub trait Scalar:
    Float + FloatConst + NumAssign + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lifts an `f64` constant (tolerance, weight, angle) into `Self`.
    fn real(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant")
    }

    /// Converts into `f64` for reporting; lossless for `f64`, rounded for `f32`.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("float-to-float conversion")
    }

    /// A pinned `f64` tolerance, widened so it stays resolvable at this
    /// scalar's precision: validation slack can never be asked to beat
    /// `1000 * epsilon`. Identity for `f64` with the bundled tolerances.
    fn validation_tol(pinned: f64) -> Self {
        Self::real(pinned).max(Self::epsilon() * Self::real(1e3))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
