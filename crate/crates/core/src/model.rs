//! Productive combinations and the flow quantities derived from them.
//!
//! A combination is a price, a unit variable cost, a split of fixed costs
//! into cash (`fixed_cash`) and non-cash charges (`fixed_noncash`,
//! depreciation and provisions), and a capacity. The two fixed-cost bases
//! give the two liquidity horizons: the immediate horizon only has to
//! cover cash fixed costs, the term horizon has to cover all of them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::thresholds::{leverage_pair, LeveragePair};

/// Which fixed-cost base a threshold or elasticity is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    /// Cash fixed costs only: potential solvency over the period.
    Immediate,
    /// Total fixed costs: capital maintenance, i.e. classical break-even.
    Term,
}

impl Horizon {
    pub const ALL: [Horizon; 2] = [Horizon::Immediate, Horizon::Term];

    pub fn label(self) -> &'static str {
        match self {
            Horizon::Immediate => "immediate",
            Horizon::Term => "term",
        }
    }
}

/// Unit margin over variable cost, `p - v`. May be zero or negative.
pub fn unit_margin<T: Scalar>(unit_price: T, unit_variable_cost: T) -> T {
    unit_price - unit_variable_cost
}

/// One production setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductiveCombination<T> {
    unit_price: T,
    unit_variable_cost: T,
    fixed_cash: T,
    fixed_noncash: T,
    capacity: T,
    investment_life: Option<T>,
}

impl<T: Scalar> ProductiveCombination<T> {
    /// Builds a combination, checking sign and finiteness of every field.
    ///
    /// A price at or below the unit variable cost is accepted; such a
    /// combination reports `is_viable() == false` and every threshold
    /// operation rejects it.
    pub fn new(
        unit_price: T,
        unit_variable_cost: T,
        fixed_cash: T,
        fixed_noncash: T,
        capacity: T,
    ) -> Result<Self> {
        check_finite("unit_price", unit_price)?;
        check_finite("unit_variable_cost", unit_variable_cost)?;
        check_finite("fixed_cash", fixed_cash)?;
        check_finite("fixed_noncash", fixed_noncash)?;
        check_finite("capacity", capacity)?;
        if unit_price <= T::zero() {
            return Err(Error::invalid("unit_price", "must be > 0"));
        }
        if unit_variable_cost < T::zero() {
            return Err(Error::invalid("unit_variable_cost", "must be >= 0"));
        }
        if fixed_cash < T::zero() {
            return Err(Error::invalid("fixed_cash", "must be >= 0"));
        }
        if fixed_noncash < T::zero() {
            return Err(Error::invalid("fixed_noncash", "must be >= 0"));
        }
        if capacity <= T::zero() {
            return Err(Error::invalid("capacity", "must be > 0"));
        }
        Ok(Self {
            unit_price,
            unit_variable_cost,
            fixed_cash,
            fixed_noncash,
            capacity,
            investment_life: None,
        })
    }

    pub fn with_investment_life(mut self, years: T) -> Result<Self> {
        check_finite("investment_life", years)?;
        if years <= T::zero() {
            return Err(Error::invalid("investment_life", "must be > 0"));
        }
        self.investment_life = Some(years);
        Ok(self)
    }

    pub fn unit_price(&self) -> T {
        self.unit_price
    }

    pub fn unit_variable_cost(&self) -> T {
        self.unit_variable_cost
    }

    pub fn fixed_cash(&self) -> T {
        self.fixed_cash
    }

    pub fn fixed_noncash(&self) -> T {
        self.fixed_noncash
    }

    pub fn fixed_total(&self) -> T {
        self.fixed_cash + self.fixed_noncash
    }

    pub fn capacity(&self) -> T {
        self.capacity
    }

    pub fn investment_life(&self) -> Option<T> {
        self.investment_life
    }

    pub fn unit_margin(&self) -> T {
        unit_margin(self.unit_price, self.unit_variable_cost)
    }

    pub fn is_viable(&self) -> bool {
        self.unit_margin() > T::zero()
    }

    /// Fixed costs the given horizon has to cover.
    pub fn fixed_base(&self, horizon: Horizon) -> T {
        match horizon {
            Horizon::Immediate => self.fixed_cash,
            Horizon::Term => self.fixed_total(),
        }
    }

    /// The unit margin, or `NonViable` when it is not positive.
    pub fn viable_margin(&self) -> Result<T> {
        let m = self.unit_margin();
        if m > T::zero() {
            Ok(m)
        } else {
            Err(Error::NonViable {
                margin: m.to_f64_lossy(),
            })
        }
    }
}

fn check_finite<T: Scalar>(name: &'static str, x: T) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be finite"))
    }
}

pub(crate) fn check_volume<T: Scalar>(c: &ProductiveCombination<T>, q: T) -> Result<()> {
    if q.is_nan() || q < T::zero() {
        return Err(Error::NegativeVolume {
            volume: q.to_f64_lossy(),
        });
    }
    if q > c.capacity {
        return Err(Error::VolumeExceedsCapacity {
            volume: q.to_f64_lossy(),
            capacity: c.capacity.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Period flows of a combination at a sold volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowSummary<T> {
    pub volume: T,
    pub revenue: T,
    pub variable_total: T,
    pub margin_total: T,
    /// Result after all fixed costs: the term virtual treasury.
    pub result: T,
    /// Self-financing capacity, margin minus cash fixed costs: the
    /// immediate virtual treasury.
    pub caf: T,
}

impl<T: Scalar> FlowSummary<T> {
    pub fn virtual_treasury(&self, horizon: Horizon) -> T {
        match horizon {
            Horizon::Immediate => self.caf,
            Horizon::Term => self.result,
        }
    }
}

/// Flows at volume `q`, which must lie in `[0, capacity]`.
pub fn flow_summary<T: Scalar>(c: &ProductiveCombination<T>, q: T) -> Result<FlowSummary<T>> {
    check_volume(c, q)?;
    let margin_total = q * c.unit_margin();
    let caf = margin_total - c.fixed_cash;
    Ok(FlowSummary {
        volume: q,
        revenue: q * c.unit_price,
        variable_total: q * c.unit_variable_cost,
        margin_total,
        result: caf - c.fixed_noncash,
        caf,
    })
}

/// Row set of a project comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectPerformance<T> {
    pub volume: T,
    /// Annual non-cash charges times investment life.
    pub capital_invested: T,
    pub margin_total: T,
    pub profit: T,
    /// `profit / capital_invested`.
    pub profitability: T,
    pub leverage: LeveragePair<T>,
}

pub fn performance_summary<T: Scalar>(
    c: &ProductiveCombination<T>,
    q: T,
) -> Result<ProjectPerformance<T>> {
    let life = c.investment_life.ok_or(Error::MissingLife)?;
    let flows = flow_summary(c, q)?;
    let capital_invested = c.fixed_noncash * life;
    if capital_invested <= T::zero() {
        return Err(Error::ZeroCapital);
    }
    Ok(ProjectPerformance {
        volume: q,
        capital_invested,
        margin_total: flows.margin_total,
        profit: flows.result,
        profitability: flows.result / capital_invested,
        leverage: leverage_pair(c, q),
    })
}
