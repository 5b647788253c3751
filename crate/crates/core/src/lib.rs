//! Treasury leverage analytics.
//!
//! The sensitivity of a firm's potential cash generation ("virtual
//! treasury") to volume and to unit margin, measured against two fixed-cost
//! bases: cash fixed costs for immediate liquidity and total fixed costs
//! (cash plus depreciation and provisions) for term liquidity.
//!
//! * [`model`]: productive combinations and their period flows.
//! * [`thresholds`]: critical volumes and margins, treasury elasticities.
//! * [`cost_behavior`]: the linear response `v = a·f + b` of the unit
//!   variable cost to fixed costs and its elasticities.
//! * [`risk`]: evaluation of a cost-structure change at fixed capacity and
//!   of a capacity expansion.
//! * [`curves`]: sampled grids for plotting, as CSV or JSON.
//!
//! All computations are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

// `!(x > 0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cost_behavior;
pub mod curves;
pub mod error;
pub mod model;
pub mod risk;
pub mod scalar;
pub mod thresholds;

pub use error::{Error, Result};
pub use model::Horizon;
pub use scalar::{round_half_away, Scalar};

pub type Combination = model::ProductiveCombination<f64>;
pub type Flows = model::FlowSummary<f64>;
pub type Performance = model::ProjectPerformance<f64>;
pub type Thresholds = thresholds::LiquidityThresholds<f64>;
pub type Leverage = thresholds::LeveragePair<f64>;
pub type Elasticity = thresholds::Elasticity<f64>;
pub type CostModel = cost_behavior::CostBehaviorModel<f64>;
pub type Transformation = risk::TransformationPlan<f64>;
pub type TransformationReport = risk::TransformationReport<f64>;
pub type Expansion = risk::ExpansionPlan<f64>;
pub type ExpansionReport = risk::ExpansionReport<f64>;
pub type Grid = curves::CurveGrid<f64>;
pub type Sampling = curves::Sampling<f64>;

/// Single-precision counterparts.
pub mod f32 {
    pub type Combination = crate::model::ProductiveCombination<f32>;
    pub type Elasticity = crate::thresholds::Elasticity<f32>;
    pub type CostModel = crate::cost_behavior::CostBehaviorModel<f32>;
    pub type Grid = crate::curves::CurveGrid<f32>;
}
