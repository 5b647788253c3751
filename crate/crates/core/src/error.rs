use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the analytics.
///
/// Numeric payloads are carried as `f64` whatever the scalar type of the
/// computation, they only serve diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("unit margin {margin} is not positive")]
    NonPositiveMargin { margin: f64 },
    #[error("volume {volume} is not positive")]
    NonPositiveVolume { volume: f64 },
    #[error("volume {volume} is negative")]
    NegativeVolume { volume: f64 },
    #[error("volume {volume} exceeds capacity {capacity}")]
    VolumeExceedsCapacity { volume: f64, capacity: f64 },
    #[error("virtual treasury is zero at this point, elasticity is undefined")]
    AtThreshold,
    #[error("investment life is not set")]
    MissingLife,
    #[error("invested capital is zero")]
    ZeroCapital,
    #[error("fitting points share the same fixed cost")]
    DegeneratePoints,
    #[error("slope {slope} is not negative: variable cost must fall as fixed costs rise")]
    NonNegativeSlope { slope: f64 },
    #[error("intercept {intercept} is not positive")]
    NonPositiveIntercept { intercept: f64 },
    #[error("fixed cost {fixed} is outside the validity domain (0, {limit})")]
    OutsideValidityDomain { fixed: f64, limit: f64 },
    #[error("base value is zero")]
    ZeroBase,
    #[error("fixed costs do not change between the two points")]
    NoFixedCostChange,
    #[error("unit variable cost equals the price, margin is zero")]
    MarginZero,
    #[error("elasticity {value} is positive, expected a non-positive cost elasticity")]
    PositiveInput { value: f64 },
    #[error("threshold volume times price does not exceed fixed costs")]
    DegenerateThreshold,
    #[error("required unit variable cost {required} is negative")]
    InfeasibleDrop { required: f64 },
    #[error("combination is not viable: unit margin {margin} is not positive")]
    NonViable { margin: f64 },
    #[error("total margin does not exceed the result")]
    MarginBelowResult,
    #[error("target elasticity {target} is not attainable (must be > 1)")]
    InvalidTarget { target: f64 },
    #[error("empty or inverted range [{lo}, {hi}] or fewer than two samples")]
    EmptyRange { lo: f64, hi: f64 },
    #[error("range [{lo}, {hi}] leaves the validity domain (0, {limit})")]
    RangeOutsideDomain { lo: f64, hi: f64, limit: f64 },
    #[error("path for slope {slope} drives unit variable cost below zero")]
    InfeasiblePath { slope: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
