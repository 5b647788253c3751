//! Insolvency-risk evaluation of a change of productive combination.
//!
//! Two procedures:
//!
//! * at fixed capacity, a rise in fixed costs must be met by a large
//!   enough drop of the unit variable cost for the liquidity thresholds
//!   `f/m` not to move up ([`assess_transformation`]);
//! * when capacity grows, fixed costs may grow too, and the verdict
//!   compares the volume ratio with the threshold ratio
//!   ([`assess_expansion`], [`sensitivity_comparison`]).
//!
//! Both procedures work per horizon, against cash fixed costs and against
//! total fixed costs separately.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{flow_summary, FlowSummary, Horizon, ProductiveCombination};
use crate::scalar::{approx_eq, round_half_away, Scalar, EXACT_REL, VERDICT_REL};
use crate::thresholds::{leverage_pair, liquidity_threshold, Elasticity, LeveragePair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Improved,
    Unchanged,
    Deteriorated,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Improved => "improved",
            Verdict::Unchanged => "unchanged",
            Verdict::Deteriorated => "deteriorated",
        }
    }
}

fn ok_or_null<S, T>(value: &Result<T>, s: S) -> Result<S::Ok, S::Error>
where
    S: Serializer,
    T: Serialize,
{
    match value {
        Ok(v) => v.serialize(s),
        Err(_) => s.serialize_none(),
    }
}

fn check_positive<T: Scalar>(name: &'static str, x: T) -> Result<()> {
    if x.is_finite() && x > T::zero() {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be finite and > 0"))
    }
}

fn check_non_negative<T: Scalar>(name: &'static str, x: T) -> Result<()> {
    if x.is_finite() && x >= T::zero() {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be finite and >= 0"))
    }
}

/// Smallest (most negative) response of `v` to `f` that keeps the critical
/// volume `q_star` in place at price `p`: `f / (f - Q*·p)`.
pub fn optimal_threshold_elasticity<T: Scalar>(
    fixed: T,
    q_star: T,
    unit_price: T,
) -> Result<Elasticity<T>> {
    check_non_negative("fixed", fixed)?;
    check_non_negative("q_star", q_star)?;
    check_positive("unit_price", unit_price)?;
    let revenue_at_threshold = q_star * unit_price;
    if !(revenue_at_threshold > fixed) {
        return Err(Error::DegenerateThreshold);
    }
    Ok(Elasticity::new(fixed / (fixed - revenue_at_threshold)))
}

/// Highest unit variable cost after a rise `delta_fixed` of the fixed
/// costs that does not worsen the threshold: `v0·(1 + E*·Δf/f0)`.
pub fn required_variable_cost<T: Scalar>(
    unit_variable_cost: T,
    fixed: T,
    delta_fixed: T,
    optimal: Elasticity<T>,
) -> Result<T> {
    check_positive("unit_variable_cost", unit_variable_cost)?;
    check_positive("fixed", fixed)?;
    check_non_negative("delta_fixed", delta_fixed)?;
    if optimal.value() > T::zero() {
        return Err(Error::invalid("optimal elasticity", "must be <= 0"));
    }
    variable_cost_floor(unit_variable_cost, fixed, delta_fixed, optimal.value())
}

fn variable_cost_floor<T: Scalar>(v0: T, f0: T, delta: T, optimal: T) -> Result<T> {
    let v1 = v0 * (T::one() + optimal * delta / f0);
    if v1 < T::zero() {
        Err(Error::InfeasibleDrop {
            required: v1.to_f64_lossy(),
        })
    } else {
        Ok(v1)
    }
}

/// Change of combination at unchanged capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformationPlan<T> {
    pub base: ProductiveCombination<T>,
    pub delta_fixed_cash: T,
    pub delta_fixed_noncash: T,
    /// Proposed unit variable cost; `None` solves for the floor.
    pub new_unit_variable_cost: Option<T>,
}

impl<T: Scalar> TransformationPlan<T> {
    pub fn new(
        base: ProductiveCombination<T>,
        delta_fixed_cash: T,
        delta_fixed_noncash: T,
        new_unit_variable_cost: Option<T>,
    ) -> Result<Self> {
        if !delta_fixed_cash.is_finite() || !delta_fixed_noncash.is_finite() {
            return Err(Error::invalid("delta", "must be finite"));
        }
        if base.fixed_cash() + delta_fixed_cash < T::zero() {
            return Err(Error::invalid(
                "delta_fixed_cash",
                "new cash fixed costs must be >= 0",
            ));
        }
        if base.fixed_noncash() + delta_fixed_noncash < T::zero() {
            return Err(Error::invalid(
                "delta_fixed_noncash",
                "new non-cash fixed costs must be >= 0",
            ));
        }
        if let Some(v) = new_unit_variable_cost {
            check_non_negative("new_unit_variable_cost", v)?;
        }
        Ok(Self {
            base,
            delta_fixed_cash,
            delta_fixed_noncash,
            new_unit_variable_cost,
        })
    }

    pub fn delta_fixed(&self, horizon: Horizon) -> T {
        match horizon {
            Horizon::Immediate => self.delta_fixed_cash,
            Horizon::Term => self.delta_fixed_cash + self.delta_fixed_noncash,
        }
    }

    fn transformed(&self, unit_variable_cost: T) -> Result<ProductiveCombination<T>> {
        let b = &self.base;
        let c = ProductiveCombination::new(
            b.unit_price(),
            unit_variable_cost,
            b.fixed_cash() + self.delta_fixed_cash,
            b.fixed_noncash() + self.delta_fixed_noncash,
            b.capacity(),
        )?;
        match b.investment_life() {
            Some(life) => c.with_investment_life(life),
            None => Ok(c),
        }
    }
}

/// Before/after figures of one horizon and the resulting judgment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizonAssessment<T> {
    pub horizon: Horizon,
    pub verdict: Verdict,
    pub threshold_before: T,
    pub threshold_after: T,
    pub leverage_before: Option<T>,
    pub leverage_after: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioVerdict<T> {
    pub immediate: HorizonAssessment<T>,
    pub term: HorizonAssessment<T>,
}

impl<T: Scalar> ScenarioVerdict<T> {
    pub fn get(&self, horizon: Horizon) -> &HorizonAssessment<T> {
        match horizon {
            Horizon::Immediate => &self.immediate,
            Horizon::Term => &self.term,
        }
    }
}

/// What one horizon demands of the unit variable cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct HorizonRequirement<T> {
    pub horizon: Horizon,
    pub fixed_before: T,
    pub fixed_after: T,
    #[serde(serialize_with = "ok_or_null")]
    pub optimal_elasticity: Result<Elasticity<T>>,
    /// Highest unit variable cost keeping this horizon's threshold.
    #[serde(serialize_with = "ok_or_null")]
    pub variable_cost_floor: Result<T>,
}

/// One row of the threshold evolution tables: the critical volumes of a
/// fixed-cost structure at a given unit margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolutionRow<T> {
    pub unit_variable_cost: T,
    pub unit_margin: T,
    pub threshold_immediate: T,
    pub threshold_term: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformationReport<T> {
    pub plan: TransformationPlan<T>,
    pub immediate: HorizonRequirement<T>,
    pub term: HorizonRequirement<T>,
    /// Unit variable cost the verdict is computed with.
    pub unit_variable_cost: T,
    /// True when no cost was proposed and the binding floor was used.
    pub solved: bool,
    pub new_unit_margin: T,
    /// Old structure at the old margin.
    pub evolution_before: EvolutionRow<T>,
    /// New structure at each candidate cost (the floors and the proposal),
    /// by increasing margin.
    pub evolution_after: Vec<EvolutionRow<T>>,
    pub verdict: ScenarioVerdict<T>,
}

impl<T: Scalar> TransformationReport<T> {
    pub fn requirement(&self, horizon: Horizon) -> &HorizonRequirement<T> {
        match horizon {
            Horizon::Immediate => &self.immediate,
            Horizon::Term => &self.term,
        }
    }
}

fn horizon_requirement<T: Scalar>(
    plan: &TransformationPlan<T>,
    horizon: Horizon,
) -> Result<HorizonRequirement<T>> {
    let base = &plan.base;
    let m0 = base.viable_margin()?;
    let v0 = base.unit_variable_cost();
    let f0 = base.fixed_base(horizon);
    let delta = plan.delta_fixed(horizon);
    let optimal = optimal_threshold_elasticity(f0, f0 / m0, base.unit_price());
    let floor = if delta == T::zero() {
        Ok(v0)
    } else {
        optimal
            .clone()
            .and_then(|e| variable_cost_floor(v0, f0, delta, e.value()))
    };
    Ok(HorizonRequirement {
        horizon,
        fixed_before: f0,
        fixed_after: f0 + delta,
        optimal_elasticity: optimal,
        variable_cost_floor: floor,
    })
}

fn compare_thresholds<T: Scalar>(before: T, after: T) -> Verdict {
    if approx_eq(before, after, T::rel_tol(VERDICT_REL)) {
        Verdict::Unchanged
    } else if after < before {
        Verdict::Improved
    } else {
        Verdict::Deteriorated
    }
}

fn evolution_row<T: Scalar>(c: &ProductiveCombination<T>) -> Result<EvolutionRow<T>> {
    let m = c.viable_margin()?;
    Ok(EvolutionRow {
        unit_variable_cost: c.unit_variable_cost(),
        unit_margin: m,
        threshold_immediate: liquidity_threshold(c.fixed_base(Horizon::Immediate), m)?,
        threshold_term: liquidity_threshold(c.fixed_base(Horizon::Term), m)?,
    })
}

fn horizon_assessment<T: Scalar>(
    horizon: Horizon,
    threshold_before: T,
    threshold_after: T,
    verdict: Verdict,
    leverage_before: &LeveragePair<T>,
    leverage_after: &LeveragePair<T>,
) -> HorizonAssessment<T> {
    HorizonAssessment {
        horizon,
        verdict,
        threshold_before,
        threshold_after,
        leverage_before: leverage_before
            .get(horizon)
            .as_ref()
            .ok()
            .map(|e| e.value()),
        leverage_after: leverage_after.get(horizon).as_ref().ok().map(|e| e.value()),
    }
}

/// Evaluates a change of combination at fixed capacity.
///
/// Without a proposed cost the lower of the two horizon floors is used,
/// so that neither threshold moves up; that fails with
/// [`Error::InfeasibleDrop`] when a floor is negative. A proposed cost is
/// always used as given and the floors are reported alongside.
pub fn assess_transformation<T: Scalar>(
    plan: &TransformationPlan<T>,
) -> Result<TransformationReport<T>> {
    let base = &plan.base;
    base.viable_margin()?;
    let immediate = horizon_requirement(plan, Horizon::Immediate)?;
    let term = horizon_requirement(plan, Horizon::Term)?;

    let (unit_variable_cost, solved) = match plan.new_unit_variable_cost {
        Some(v) => (v, false),
        None => {
            let a = immediate.variable_cost_floor.clone()?;
            let b = term.variable_cost_floor.clone()?;
            (a.min(b), true)
        }
    };
    let after = plan.transformed(unit_variable_cost)?;
    let new_unit_margin = after.viable_margin()?;

    let evolution_before = evolution_row(base)?;
    let mut candidates: Vec<T> = [&immediate, &term]
        .iter()
        .filter_map(|r| r.variable_cost_floor.as_ref().ok().copied())
        .collect();
    candidates.push(unit_variable_cost);
    // by increasing margin
    candidates.sort_by(|a, b| b.partial_cmp(a).expect("finite costs"));
    candidates.dedup_by(|a, b| approx_eq(*a, *b, T::rel_tol(VERDICT_REL)));
    let evolution_after = candidates
        .into_iter()
        .filter_map(|v| plan.transformed(v).ok())
        .filter(|c| c.is_viable())
        .map(|c| evolution_row(&c))
        .collect::<Result<Vec<_>>>()?;

    let after_row = evolution_row(&after)?;
    let q = base.capacity();
    let lev_before = leverage_pair(base, q);
    let lev_after = leverage_pair(&after, q);
    let assess = |h: Horizon, before: T, after: T| {
        horizon_assessment(
            h,
            before,
            after,
            compare_thresholds(before, after),
            &lev_before,
            &lev_after,
        )
    };
    let verdict = ScenarioVerdict {
        immediate: assess(
            Horizon::Immediate,
            evolution_before.threshold_immediate,
            after_row.threshold_immediate,
        ),
        term: assess(
            Horizon::Term,
            evolution_before.threshold_term,
            after_row.threshold_term,
        ),
    };

    Ok(TransformationReport {
        plan: *plan,
        immediate,
        term,
        unit_variable_cost,
        solved,
        new_unit_margin,
        evolution_before,
        evolution_after,
        verdict,
    })
}

/// Elasticity of fixed costs with respect to volume along `f = Q·m - r`:
/// `Q / (Q - r/m)`. Exactly 1 when `r = 0`, above 1 for a profit, in
/// `(0, 1)` for a loss.
pub fn fixed_cost_elasticity_vs_volume<T: Scalar>(
    volume: T,
    result: T,
    margin: T,
) -> Result<Elasticity<T>> {
    if !(margin > T::zero()) {
        return Err(Error::NonPositiveMargin {
            margin: margin.to_f64_lossy(),
        });
    }
    if !(volume > T::zero()) {
        return Err(Error::NonPositiveVolume {
            volume: volume.to_f64_lossy(),
        });
    }
    if !result.is_finite() {
        return Err(Error::invalid("result", "must be finite"));
    }
    if result > T::zero() && volume * margin <= result {
        return Err(Error::MarginBelowResult);
    }
    Ok(Elasticity::new(volume / (volume - result / margin)))
}

/// Fixed-cost level giving treasury leverage `target` at volume `q` and
/// margin `m`: `Q·m·(E - 1) / E`.
pub fn fixed_cost_ceiling<T: Scalar>(volume: T, margin: T, target: T) -> Result<T> {
    check_positive("volume", volume)?;
    check_positive("margin", margin)?;
    if !(target.is_finite() && target >= T::one()) {
        return Err(Error::InvalidTarget {
            target: target.to_f64_lossy(),
        });
    }
    Ok(volume * margin * (target - T::one()) / target)
}

/// Price at which the combination `(q, f, v)` has treasury leverage
/// `target`: solves `E = Q / (Q - f/m)` for `m` and returns `m + v`.
pub fn price_to_maintain_leverage<T: Scalar>(
    target: T,
    volume: T,
    fixed: T,
    unit_variable_cost: T,
) -> Result<T> {
    if !(target.is_finite() && target > T::one()) {
        return Err(Error::InvalidTarget {
            target: target.to_f64_lossy(),
        });
    }
    check_positive("volume", volume)?;
    check_positive("fixed", fixed)?;
    check_non_negative("unit_variable_cost", unit_variable_cost)?;
    let margin = fixed * target / (volume * (target - T::one()));
    Ok(margin + unit_variable_cost)
}

/// Result of comparing `q1/q2` with `q*1/q*2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison<T> {
    pub volume_ratio: T,
    pub threshold_ratio: T,
    pub verdict: Verdict,
}

/// Leverage `Q/(Q - Q*)` is unchanged when `q1/q2 = q*1/q*2`; a smaller
/// volume ratio means the sensitivity improved, a larger one that it
/// deteriorated.
pub fn sensitivity_comparison<T: Scalar>(
    volume_before: T,
    volume_after: T,
    threshold_before: T,
    threshold_after: T,
) -> Comparison<T> {
    let volume_ratio = volume_before / volume_after;
    let threshold_ratio = threshold_before / threshold_after;
    let both_zero = threshold_before == T::zero() && threshold_after == T::zero();
    let verdict = if both_zero || approx_eq(volume_ratio, threshold_ratio, T::rel_tol(EXACT_REL)) {
        Verdict::Unchanged
    } else if volume_ratio < threshold_ratio {
        Verdict::Improved
    } else {
        Verdict::Deteriorated
    };
    Comparison {
        volume_ratio,
        threshold_ratio,
        verdict,
    }
}

/// Capacity increase with a new cost structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionPlan<T> {
    pub base: ProductiveCombination<T>,
    pub new_capacity: T,
    pub new_fixed_cash: T,
    pub new_fixed_noncash: T,
    pub new_unit_variable_cost: T,
    pub new_unit_price: T,
}

impl<T: Scalar> ExpansionPlan<T> {
    pub fn new(
        base: ProductiveCombination<T>,
        new_capacity: T,
        new_fixed_cash: T,
        new_fixed_noncash: T,
        new_unit_variable_cost: T,
        new_unit_price: T,
    ) -> Result<Self> {
        let plan = Self {
            base,
            new_capacity,
            new_fixed_cash,
            new_fixed_noncash,
            new_unit_variable_cost,
            new_unit_price,
        };
        plan.expanded()?;
        Ok(plan)
    }

    pub fn is_expansion(&self) -> bool {
        self.new_capacity > self.base.capacity()
    }

    pub fn expanded(&self) -> Result<ProductiveCombination<T>> {
        let c = ProductiveCombination::new(
            self.new_unit_price,
            self.new_unit_variable_cost,
            self.new_fixed_cash,
            self.new_fixed_noncash,
            self.new_capacity,
        )?;
        match self.base.investment_life() {
            Some(life) => c.with_investment_life(life),
            None => Ok(c),
        }
    }
}

/// Prices bounding the new structure at the new capacity.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct PriceBounds<T> {
    /// Leverage target the bounds were solved for, per horizon.
    pub target_immediate: Option<T>,
    pub target_term: Option<T>,
    /// Price keeping the term leverage at its former level.
    #[serde(serialize_with = "ok_or_null")]
    pub term_maintaining: Result<T>,
    /// Lowest price keeping the immediate leverage at its former level.
    #[serde(serialize_with = "ok_or_null")]
    pub immediate_tolerable: Result<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport<T> {
    pub plan: ExpansionPlan<T>,
    pub flows_before: FlowSummary<T>,
    pub flows_after: FlowSummary<T>,
    pub immediate: HorizonAssessment<T>,
    pub term: HorizonAssessment<T>,
    pub comparison_immediate: Comparison<T>,
    pub comparison_term: Comparison<T>,
    /// Solved with the exact former leverages.
    pub prices: PriceBounds<T>,
    /// Solved with the former leverages rounded to `target_decimals`.
    pub prices_rounded_targets: Option<PriceBounds<T>>,
    pub target_decimals: Option<u32>,
}

impl<T: Scalar> ExpansionReport<T> {
    pub fn assessment(&self, horizon: Horizon) -> &HorizonAssessment<T> {
        match horizon {
            Horizon::Immediate => &self.immediate,
            Horizon::Term => &self.term,
        }
    }

    pub fn comparison(&self, horizon: Horizon) -> &Comparison<T> {
        match horizon {
            Horizon::Immediate => &self.comparison_immediate,
            Horizon::Term => &self.comparison_term,
        }
    }
}

fn price_bounds<T: Scalar>(
    after: &ProductiveCombination<T>,
    leverage_before: &LeveragePair<T>,
    round_to: Option<u32>,
) -> PriceBounds<T> {
    let target = |h: Horizon| {
        leverage_before
            .get(h)
            .as_ref()
            .ok()
            .map(|e| match round_to {
                Some(d) => round_half_away(e.value(), d),
                None => e.value(),
            })
    };
    let solve = |h: Horizon, t: Option<T>| match t {
        Some(t) => price_to_maintain_leverage(
            t,
            after.capacity(),
            after.fixed_base(h),
            after.unit_variable_cost(),
        ),
        None => Err(Error::AtThreshold),
    };
    let target_immediate = target(Horizon::Immediate);
    let target_term = target(Horizon::Term);
    PriceBounds {
        target_immediate,
        target_term,
        term_maintaining: solve(Horizon::Term, target_term),
        immediate_tolerable: solve(Horizon::Immediate, target_immediate),
    }
}

/// Before/after indicators of a capacity expansion, both comparison
/// verdicts and the two price bounds.
///
/// `target_decimals` additionally solves the price bounds from former
/// leverages rounded to that many places, as they would be read off a
/// printed table.
pub fn assess_expansion<T: Scalar>(
    plan: &ExpansionPlan<T>,
    target_decimals: Option<u32>,
) -> Result<ExpansionReport<T>> {
    let base = &plan.base;
    let after = plan.expanded()?;
    let m_before = base.viable_margin()?;
    let m_after = after.viable_margin()?;
    let q_before = base.capacity();
    let q_after = after.capacity();

    let flows_before = flow_summary(base, q_before)?;
    let flows_after = flow_summary(&after, q_after)?;
    let lev_before = leverage_pair(base, q_before);
    let lev_after = leverage_pair(&after, q_after);

    let mut assessments = Vec::with_capacity(2);
    let mut comparisons = Vec::with_capacity(2);
    for h in Horizon::ALL {
        let t_before = liquidity_threshold(base.fixed_base(h), m_before)?;
        let t_after = liquidity_threshold(after.fixed_base(h), m_after)?;
        let cmp = sensitivity_comparison(q_before, q_after, t_before, t_after);
        assessments.push(horizon_assessment(
            h,
            t_before,
            t_after,
            cmp.verdict,
            &lev_before,
            &lev_after,
        ));
        comparisons.push(cmp);
    }
    let term = assessments.pop().expect("two horizons");
    let immediate = assessments.pop().expect("two horizons");

    Ok(ExpansionReport {
        plan: *plan,
        flows_before,
        flows_after,
        immediate,
        term,
        comparison_immediate: comparisons[0],
        comparison_term: comparisons[1],
        prices: price_bounds(&after, &lev_before, None),
        prices_rounded_targets: target_decimals.map(|d| price_bounds(&after, &lev_before, Some(d))),
        target_decimals,
    })
}
