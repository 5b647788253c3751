//! Liquidity thresholds and treasury elasticities.
//!
//! Virtual treasury is `T = m·Q - f`. Its elasticity with respect to the
//! volume `Q` or to the unit margin `m` is the same expression,
//! `m·Q / (m·Q - f)`: negative below the critical point, singular at it,
//! and falling towards 1 from above past it. The critical volume is
//! `Q* = f/m` and the critical margin for a given volume is `m* = f/Q`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{Horizon, ProductiveCombination};
use crate::scalar::{Scalar, SINGULAR_REL};

/// A point elasticity. Never holds a singular value: computations that
/// hit the critical point return [`Error::AtThreshold`] instead.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Elasticity<T>(T);

impl<T: Scalar> Elasticity<T> {
    pub(crate) fn new(value: T) -> Self {
        debug_assert!(value.is_finite());
        Elasticity(value)
    }

    pub fn value(self) -> T {
        self.0
    }
}

impl<T: Scalar> fmt::Display for Elasticity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// The four liquidity break indicators: critical volume and critical
/// margin, against cash and against total fixed costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiquidityThresholds<T> {
    /// Volume the critical margins are computed at.
    pub reference_volume: T,
    pub q_star_immediate: T,
    pub q_star_term: T,
    pub m_star_immediate: T,
    pub m_star_term: T,
}

impl<T: Scalar> LiquidityThresholds<T> {
    pub fn q_star(&self, horizon: Horizon) -> T {
        match horizon {
            Horizon::Immediate => self.q_star_immediate,
            Horizon::Term => self.q_star_term,
        }
    }

    pub fn m_star(&self, horizon: Horizon) -> T {
        match horizon {
            Horizon::Immediate => self.m_star_immediate,
            Horizon::Term => self.m_star_term,
        }
    }
}

/// Where a volume sits relative to a critical volume `Q*`.
///
/// Intervals are closed on the left: `Q = 2·Q*` is `Moderate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SensitivityZone {
    /// `Q < Q*/2`, elasticity in `(-1, 0]`.
    BelowHalfThreshold,
    /// `Q*/2 <= Q < Q*`, elasticity at or below `-1`.
    BetweenHalfAndThreshold,
    /// Within the singular window around `Q*`.
    Singular,
    /// `Q* < Q < 2·Q*`, elasticity above 2.
    HighSensitivity,
    /// `2·Q* <= Q < 3·Q*`, elasticity in `(1.5, 2]`.
    Moderate,
    /// `Q >= 3·Q*`, elasticity at most 1.5.
    Asymptotic,
}

/// Critical volume `f/m`.
pub fn liquidity_threshold<T: Scalar>(fixed: T, margin: T) -> Result<T> {
    check_fixed(fixed)?;
    if !(margin > T::zero()) {
        return Err(Error::NonPositiveMargin {
            margin: margin.to_f64_lossy(),
        });
    }
    Ok(fixed / margin)
}

/// Critical unit margin `f/Q` at volume `q`.
pub fn critical_margin<T: Scalar>(fixed: T, volume: T) -> Result<T> {
    check_fixed(fixed)?;
    if !(volume > T::zero()) {
        return Err(Error::NonPositiveVolume {
            volume: volume.to_f64_lossy(),
        });
    }
    Ok(fixed / volume)
}

fn check_fixed<T: Scalar>(fixed: T) -> Result<()> {
    if fixed.is_finite() && fixed >= T::zero() {
        Ok(())
    } else {
        Err(Error::invalid("fixed", "must be finite and >= 0"))
    }
}

/// `mQ / (mQ - f)`, refusing the singular window.
fn treasury_elasticity<T: Scalar>(volume: T, fixed: T, margin: T) -> Result<Elasticity<T>> {
    let total = volume * margin;
    let treasury = total - fixed;
    let window = T::rel_tol(SINGULAR_REL) * total.max(fixed);
    if treasury.abs() <= window {
        return Err(Error::AtThreshold);
    }
    if total == T::zero() {
        return Ok(Elasticity::new(T::zero()));
    }
    Ok(Elasticity::new(total / treasury))
}

/// Elasticity of virtual treasury with respect to volume.
///
/// `q = 0` gives 0 (no activity, treasury `-f` does not respond).
pub fn elasticity_volume<T: Scalar>(volume: T, fixed: T, margin: T) -> Result<Elasticity<T>> {
    check_fixed(fixed)?;
    if !(margin > T::zero()) {
        return Err(Error::NonPositiveMargin {
            margin: margin.to_f64_lossy(),
        });
    }
    if !(volume >= T::zero()) {
        return Err(Error::NegativeVolume {
            volume: volume.to_f64_lossy(),
        });
    }
    treasury_elasticity(volume, fixed, margin)
}

/// Elasticity of virtual treasury with respect to the unit margin, at a
/// fixed volume. Singular at `m = f/q`.
pub fn elasticity_margin<T: Scalar>(margin: T, fixed: T, volume: T) -> Result<Elasticity<T>> {
    check_fixed(fixed)?;
    if !(volume > T::zero()) {
        return Err(Error::NonPositiveVolume {
            volume: volume.to_f64_lossy(),
        });
    }
    if !(margin >= T::zero()) {
        return Err(Error::NonPositiveMargin {
            margin: margin.to_f64_lossy(),
        });
    }
    treasury_elasticity(volume, fixed, margin)
}

/// Immediate ("cash") and term ("operating") treasury leverage at one
/// volume. Each horizon succeeds or fails on its own.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct LeveragePair<T> {
    #[serde(serialize_with = "value_or_null")]
    pub immediate: Result<Elasticity<T>>,
    #[serde(serialize_with = "value_or_null")]
    pub term: Result<Elasticity<T>>,
}

impl<T: Scalar> LeveragePair<T> {
    pub fn get(&self, horizon: Horizon) -> &Result<Elasticity<T>> {
        match horizon {
            Horizon::Immediate => &self.immediate,
            Horizon::Term => &self.term,
        }
    }
}

fn value_or_null<S, T>(value: &Result<Elasticity<T>>, s: S) -> Result<S::Ok, S::Error>
where
    S: Serializer,
    T: Serialize,
{
    match value {
        Ok(e) => e.serialize(s),
        Err(_) => s.serialize_none(),
    }
}

pub fn leverage_pair<T: Scalar>(c: &ProductiveCombination<T>, volume: T) -> LeveragePair<T> {
    let m = c.unit_margin();
    LeveragePair {
        immediate: elasticity_volume(volume, c.fixed_base(Horizon::Immediate), m),
        term: elasticity_volume(volume, c.fixed_base(Horizon::Term), m),
    }
}

pub fn sensitivity_zone<T: Scalar>(volume: T, q_star: T) -> SensitivityZone {
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    if (volume - q_star).abs() <= T::rel_tol(SINGULAR_REL) * q_star {
        SensitivityZone::Singular
    } else if volume < q_star / two {
        SensitivityZone::BelowHalfThreshold
    } else if volume < q_star {
        SensitivityZone::BetweenHalfAndThreshold
    } else if volume < two * q_star {
        SensitivityZone::HighSensitivity
    } else if volume < three * q_star {
        SensitivityZone::Moderate
    } else {
        SensitivityZone::Asymptotic
    }
}

/// All four break indicators, the critical margins taken at `reference_volume`.
pub fn thresholds<T: Scalar>(
    c: &ProductiveCombination<T>,
    reference_volume: T,
) -> Result<LiquidityThresholds<T>> {
    let m = c.unit_margin();
    Ok(LiquidityThresholds {
        reference_volume,
        q_star_immediate: liquidity_threshold(c.fixed_base(Horizon::Immediate), m)?,
        q_star_term: liquidity_threshold(c.fixed_base(Horizon::Term), m)?,
        m_star_immediate: critical_margin(c.fixed_base(Horizon::Immediate), reference_volume)?,
        m_star_term: critical_margin(c.fixed_base(Horizon::Term), reference_volume)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn projet(v: f64, fd: f64, fnc: f64) -> ProductiveCombination<f64> {
        ProductiveCombination::new(20.0, v, fd, fnc, 2_400_000.0).unwrap()
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(liquidity_threshold(8_000_000.0, 8.0).unwrap(), 1_000_000.0);
        assert_eq!(liquidity_threshold(2_000_000.0, 8.0).unwrap(), 250_000.0);
        assert_eq!(liquidity_threshold(0.0, 3.5).unwrap(), 0.0);
        assert!(matches!(
            liquidity_threshold(1.0, 0.0),
            Err(Error::NonPositiveMargin { .. })
        ));
    }

    #[test]
    fn critical_margin_examples() {
        assert_relative_eq!(
            critical_margin(8_000_000.0, 2_400_000.0).unwrap(),
            10.0 / 3.0,
            max_relative = 1e-15
        );
        // 2 000 000 / 2 400 000 = 5/6 by long division
        assert_relative_eq!(
            critical_margin(2_000_000.0, 2_400_000.0).unwrap(),
            0.833_333_333_333_333_3,
            max_relative = 1e-15
        );
        assert_eq!(critical_margin(0.0, 10.0).unwrap(), 0.0);
        assert!(matches!(
            critical_margin(1.0, 0.0),
            Err(Error::NonPositiveVolume { .. })
        ));
    }

    #[test]
    fn volume_elasticity_examples() {
        let e = elasticity_volume(2_400_000.0, 8_000_000.0, 8.0).unwrap();
        assert_relative_eq!(e.value(), 12.0 / 7.0, max_relative = 1e-12);
        let q_star = 1_000_000.0;
        for (k, expected) in [(2.0, 2.0), (3.0, 1.5), (0.5, -1.0), (2.0 / 3.0, -2.0)] {
            let e = elasticity_volume(k * q_star, 8_000_000.0, 8.0).unwrap();
            assert_relative_eq!(e.value(), expected, max_relative = 1e-12);
        }
        assert_eq!(
            elasticity_volume(q_star, 8_000_000.0, 8.0).unwrap_err(),
            Error::AtThreshold
        );
        assert_eq!(
            elasticity_volume(0.0, 8_000_000.0, 8.0).unwrap().value(),
            0.0
        );
        assert!(elasticity_margin(0.0_f64, 8_000_000.0, 1.0)
            .unwrap()
            .value()
            .is_sign_positive());
        assert!(matches!(
            elasticity_volume(1.0, 1.0, -1.0),
            Err(Error::NonPositiveMargin { .. })
        ));
    }

    #[test]
    fn margin_elasticity_examples() {
        let f = 8_000_000.0;
        let q = 2_400_000.0;
        let m_star = f / q;
        for (k, expected) in [(2.0, 2.0), (3.0, 1.5), (0.5, -1.0)] {
            let e = elasticity_margin(k * m_star, f, q).unwrap();
            assert_relative_eq!(e.value(), expected, max_relative = 1e-12);
        }
        // direct evaluation of mQ/(mQ - f)
        let expected = 8.0 * q / (8.0 * q - 2_000_000.0);
        let e = elasticity_margin(8.0, 2_000_000.0, q).unwrap();
        assert_relative_eq!(e.value(), expected, max_relative = 1e-12);
        assert_relative_eq!(e.value(), 1.1163, epsilon = 1e-4);
        assert_eq!(
            elasticity_margin(m_star, f, q).unwrap_err(),
            Error::AtThreshold
        );
    }

    #[test]
    fn leverage_pairs_of_the_three_projects() {
        let cases = [
            (projet(12.0, 2e6, 6e6), 1.116, 1.714),
            (projet(10.0, 3e6, 12e6), 1.143, 2.667),
            (projet(8.0, 2.4e6, 14.4e6), 1.091, 2.4),
        ];
        for (c, imm, term) in cases {
            let pair = leverage_pair(&c, 2_400_000.0);
            assert_relative_eq!(pair.immediate.unwrap().value(), imm, epsilon = 5e-4);
            assert_relative_eq!(pair.term.unwrap().value(), term, epsilon = 5e-4);
        }
    }

    #[test]
    fn leverage_between_thresholds_is_mixed() {
        let pair = leverage_pair(&projet(12.0, 2e6, 6e6), 500_000.0);
        assert!(pair.immediate.unwrap().value() > 0.0);
        assert!(pair.term.unwrap().value() < 0.0);
        let at_term = leverage_pair(&projet(12.0, 2e6, 6e6), 1_000_000.0);
        assert!(at_term.immediate.is_ok());
        assert_eq!(at_term.term.unwrap_err(), Error::AtThreshold);
    }

    #[test]
    fn zones() {
        use SensitivityZone::*;
        assert_eq!(sensitivity_zone(2_400_000.0, 250_000.0), Asymptotic);
        assert_eq!(sensitivity_zone(1.5, 1.0), HighSensitivity);
        assert_eq!(sensitivity_zone(2.0, 1.0), Moderate);
        assert_eq!(sensitivity_zone(3.0, 1.0), Asymptotic);
        assert_eq!(sensitivity_zone(0.0, 1.0), BelowHalfThreshold);
        assert_eq!(sensitivity_zone(0.5, 1.0), BetweenHalfAndThreshold);
        assert_eq!(sensitivity_zone(1.0, 1.0), Singular);
        assert_eq!(sensitivity_zone(1.0 + 1e-12, 1.0), Singular);
    }

    #[test]
    fn four_indicators() {
        let t = thresholds(&projet(12.0, 2e6, 6e6), 2_400_000.0).unwrap();
        assert_eq!(t.q_star_immediate, 250_000.0);
        assert_eq!(t.q_star_term, 1_000_000.0);
        assert_relative_eq!(t.m_star_immediate, 5.0 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(t.m_star_term, 10.0 / 3.0, max_relative = 1e-15);

        let t3 = thresholds(&projet(8.0, 2.4e6, 14.4e6), 2_400_000.0).unwrap();
        assert_relative_eq!(t3.q_star_immediate, 200_000.0, max_relative = 1e-15);
        assert_relative_eq!(t3.q_star_term, 1_400_000.0, max_relative = 1e-15);

        let flat = thresholds(&projet(12.0, 2e6, 0.0), 2_400_000.0).unwrap();
        assert_eq!(flat.q_star_immediate, flat.q_star_term);
    }

    #[test]
    fn non_viable_thresholds_rejected() {
        let c = projet(20.0, 1.0, 1.0);
        assert!(matches!(
            thresholds(&c, 1.0),
            Err(Error::NonPositiveMargin { .. })
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let e = elasticity_volume(2_400_000.0_f32, 8_000_000.0, 8.0).unwrap();
        assert!((e.value() - 12.0 / 7.0).abs() < 1e-5);
        assert_eq!(
            elasticity_volume(1_000_000.0_f32, 8_000_000.0, 8.0).unwrap_err(),
            Error::AtThreshold
        );
    }
}
