//! Scalar abstraction shared by every computation in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// A relative tolerance of `rel`, widened to what the type can resolve.
    fn rel_tol(rel: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(16.0);
        Self::lit(rel).max(floor)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Relative half-width of the window around a critical point where
/// elasticities are reported as singular.
pub const SINGULAR_REL: f64 = 1e-9;

/// Relative tolerance under which two thresholds count as unchanged.
pub const VERDICT_REL: f64 = 1e-9;

/// Relative tolerance for the ratio test of [`crate::risk::sensitivity_comparison`]
/// and for the `-1` boundary of the cost elasticity classification.
pub const EXACT_REL: f64 = 1e-12;

/// Rounds to `decimals` places, ties away from zero.
///
/// Values such as `0.075` are not exactly representable and sit a hair
/// below the tie; a nudge of a few ulps of the scaled value puts them back
/// on it before rounding.
pub fn round_half_away<T: Scalar>(x: T, decimals: u32) -> T {
    let scale = T::lit(10f64.powi(decimals as i32));
    let scaled = x * scale;
    let nudge = scaled.abs() * T::epsilon() * T::lit(8.0);
    let rounded = (scaled + scaled.signum() * nudge).round();
    rounded / scale
}

/// `|a - b| <= rel * max(|a|, |b|)`, with an absolute floor at zero.
pub(crate) fn approx_eq<T: Scalar>(a: T, b: T, rel: T) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= rel * scale
}
