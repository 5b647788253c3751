//! Linear response of the unit variable cost to fixed costs, `v = a·f + b`.
//!
//! Raising fixed costs (automation, capital replacing labour) is expected
//! to lower the unit variable cost. The slope `a` is negative and the
//! intercept `b` is the ceiling of `v` when fixed costs vanish, typically
//! the market price. The law is only meaningful while `v > 0`, that is
//! for `0 <= f < -b/a`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{approx_eq, Scalar, EXACT_REL};
use crate::thresholds::Elasticity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostBehaviorModel<T> {
    slope: T,
    intercept: T,
}

impl<T: Scalar> CostBehaviorModel<T> {
    pub fn new(slope: T, intercept: T) -> Result<Self> {
        if !slope.is_finite() || !intercept.is_finite() {
            return Err(Error::invalid("cost model", "coefficients must be finite"));
        }
        if !(slope < T::zero()) {
            return Err(Error::NonNegativeSlope {
                slope: slope.to_f64_lossy(),
            });
        }
        if !(intercept > T::zero()) {
            return Err(Error::NonPositiveIntercept {
                intercept: intercept.to_f64_lossy(),
            });
        }
        Ok(Self { slope, intercept })
    }

    pub fn slope(&self) -> T {
        self.slope
    }

    pub fn intercept(&self) -> T {
        self.intercept
    }

    pub fn unit_variable_cost(&self, fixed: T) -> T {
        self.slope * fixed + self.intercept
    }

    /// Upper end `-b/a` of the validity domain, where `v` reaches zero.
    pub fn domain_limit(&self) -> T {
        -self.intercept / self.slope
    }

    /// Fixed cost `-b/(2a)` at which the relative elasticity equals -1.
    pub fn unit_elasticity_point(&self) -> T {
        self.domain_limit() / T::lit(2.0)
    }

    fn check_domain(&self, fixed: T, strict_low: bool) -> Result<()> {
        let limit = self.domain_limit();
        let low_ok = if strict_low {
            fixed > T::zero()
        } else {
            fixed >= T::zero()
        };
        if low_ok && fixed < limit {
            Ok(())
        } else {
            Err(Error::OutsideValidityDomain {
                fixed: fixed.to_f64_lossy(),
                limit: limit.to_f64_lossy(),
            })
        }
    }
}

/// Line through two `(fixed, unit_variable_cost)` observations.
pub fn fit_cost_model<T: Scalar>(p1: (T, T), p2: (T, T)) -> Result<CostBehaviorModel<T>> {
    let (f1, v1) = p1;
    let (f2, v2) = p2;
    if f1 == f2 {
        return Err(Error::DegeneratePoints);
    }
    let slope = (v2 - v1) / (f2 - f1);
    let intercept = v1 - slope * f1;
    CostBehaviorModel::new(slope, intercept)
}

/// Line through one observation with a known intercept (e.g. the market price).
pub fn fit_cost_model_with_intercept<T: Scalar>(
    point: (T, T),
    intercept: T,
) -> Result<CostBehaviorModel<T>> {
    let (f, v) = point;
    if f == T::zero() {
        return Err(Error::DegeneratePoints);
    }
    CostBehaviorModel::new((v - intercept) / f, intercept)
}

/// Point elasticity of `v` with respect to `f` under the model:
/// `a·f / (a·f + b)`. Strictly inside the validity domain.
pub fn relative_elasticity_vf<T: Scalar>(
    fixed: T,
    model: &CostBehaviorModel<T>,
) -> Result<Elasticity<T>> {
    model.check_domain(fixed, true)?;
    let af = model.slope * fixed;
    Ok(Elasticity::new(af / (af + model.intercept)))
}

/// Arc elasticity `(Δv/v0) / (Δf/f0)` between two observations.
pub fn arc_elasticity_vf<T: Scalar>(f0: T, v0: T, f1: T, v1: T) -> Result<Elasticity<T>> {
    if f0 == T::zero() || v0 == T::zero() {
        return Err(Error::ZeroBase);
    }
    if f0 < T::zero() || v0 < T::zero() {
        return Err(Error::invalid(
            "base",
            "fixed cost and unit cost must be > 0",
        ));
    }
    if f1 == f0 {
        return Err(Error::NoFixedCostChange);
    }
    Ok(Elasticity::new(((v1 - v0) / v0) / ((f1 - f0) / f0)))
}

/// Constant arc elasticity from base `(f0, v0)` along any move on the line:
/// `a·f0 / v0`.
pub fn absolute_elasticity_vf<T: Scalar>(
    f0: T,
    v0: T,
    model: &CostBehaviorModel<T>,
) -> Result<Elasticity<T>> {
    model.check_domain(f0, false)?;
    absolute_elasticity_from_slope(f0, v0, model.slope)
}

/// [`absolute_elasticity_vf`] without the model invariants, so that a flat
/// (`a = 0`) response can be evaluated.
pub fn absolute_elasticity_from_slope<T: Scalar>(f0: T, v0: T, slope: T) -> Result<Elasticity<T>> {
    if !(v0 > T::zero()) {
        return Err(Error::ZeroBase);
    }
    Ok(Elasticity::new(slope * f0 / v0))
}

/// Elasticity of the unit margin `p - v` with respect to `v`: `-v / (p - v)`.
///
/// The value is signed (negative); the magnitude reads as "a 1 % drop in
/// variable cost raises the margin by |E| %".
pub fn margin_elasticity_wrt_v<T: Scalar>(
    unit_variable_cost: T,
    unit_price: T,
) -> Result<Elasticity<T>> {
    let v = unit_variable_cost;
    if !(v >= T::zero()) {
        return Err(Error::invalid("unit_variable_cost", "must be >= 0"));
    }
    let margin = unit_price - v;
    if margin == T::zero() {
        return Err(Error::MarginZero);
    }
    if margin < T::zero() {
        return Err(Error::NonPositiveMargin {
            margin: margin.to_f64_lossy(),
        });
    }
    Ok(Elasticity::new(-v / margin))
}

/// Strength of a (non-positive) cost elasticity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ElasticityClassification {
    /// `E < -1`: the relative drop of `v` outpaces the relative rise of `f`.
    Strong,
    /// `E = -1`.
    Boundary,
    /// `-1 < E < 0`.
    Weak,
    /// `E = 0`.
    Null,
}

pub fn classify_elasticity<T: Scalar>(e: Elasticity<T>) -> Result<ElasticityClassification> {
    let value = e.value();
    let tol = T::rel_tol(EXACT_REL);
    let minus_one = -T::one();
    if value.abs() <= tol {
        Ok(ElasticityClassification::Null)
    } else if value > T::zero() {
        Err(Error::PositiveInput {
            value: value.to_f64_lossy(),
        })
    } else if approx_eq(value, minus_one, tol) {
        Ok(ElasticityClassification::Boundary)
    } else if value < minus_one {
        Ok(ElasticityClassification::Strong)
    } else {
        Ok(ElasticityClassification::Weak)
    }
}
