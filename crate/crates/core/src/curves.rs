//! Sampled grids for plotting the elasticity curves, the liquidity
//! indifference contours and the cost behaviour lines.
//!
//! A grid is a sampler over the point operations of the other modules: it
//! never re-derives a value. Abscissas closer to a critical point than the
//! gap fraction are dropped and the excluded windows are listed in
//! `singularity_gaps`, so every emitted cell is finite.

use serde::Serialize;

use crate::cost_behavior::{
    absolute_elasticity_from_slope, classify_elasticity, relative_elasticity_vf, CostBehaviorModel,
    ElasticityClassification,
};
use crate::error::{Error, Result};
use crate::model::{Horizon, ProductiveCombination};
use crate::scalar::Scalar;
use crate::thresholds::{elasticity_margin, elasticity_volume};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    ElasticityVsQ,
    ElasticityVsM,
    IndifferenceContours,
    CostBehavior,
    RelativeElasticityVsF,
    AbsoluteElasticityLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Spacing {
    #[default]
    Uniform,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling<T> {
    pub samples: usize,
    pub spacing: Spacing,
    /// Half-width of the excluded window around a critical point, as a
    /// fraction of the critical value.
    pub gap: T,
}

impl<T: Scalar> Default for Sampling<T> {
    fn default() -> Self {
        Self {
            samples: 256,
            spacing: Spacing::Uniform,
            gap: T::lit(0.01),
        }
    }
}

impl<T: Scalar> Sampling<T> {
    pub fn with_samples(samples: usize) -> Self {
        Self {
            samples,
            ..Self::default()
        }
    }
}

/// A table of sampled series.
///
/// Single-series grids have strictly increasing abscissas. Grids holding
/// several curves in long format ([`CurveKind::IndifferenceContours`],
/// [`CurveKind::AbsoluteElasticityLines`]) carry the curve parameter in
/// their first column and are strictly increasing within each curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveGrid<T> {
    pub kind: CurveKind,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<T>>,
    pub singularity_gaps: Vec<(T, T)>,
}

impl<T: Scalar + Serialize> CurveGrid<T> {
    /// Comma separated, header first, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        out.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            out.write_record(row.iter().map(|x| x.to_string()))
                .expect("in-memory write");
        }
        String::from_utf8(out.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("finite cells serialize");
        s.push('\n');
        s
    }
}

impl<T: Scalar> CurveGrid<T> {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

fn abscissas<T: Scalar>(lo: T, hi: T, sampling: &Sampling<T>) -> Result<Vec<T>> {
    let n = sampling.samples;
    let empty = || Error::EmptyRange {
        lo: lo.to_f64_lossy(),
        hi: hi.to_f64_lossy(),
    };
    if n < 2 || !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
        return Err(empty());
    }
    let last = T::from_usize(n - 1).expect("sample count fits");
    let mut xs: Vec<T> = match sampling.spacing {
        Spacing::Uniform => (0..n)
            .map(|i| lo + (hi - lo) * T::from_usize(i).expect("index fits") / last)
            .collect(),
        Spacing::Log => {
            if !(lo > T::zero()) {
                return Err(empty());
            }
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * T::from_usize(i).expect("index fits") / last).exp())
                .collect()
        }
    };
    xs[0] = lo;
    xs[n - 1] = hi;
    xs.dedup();
    Ok(xs)
}

fn check_gap<T: Scalar>(gap: T) -> Result<()> {
    // below the singular window the guard in the point operations would fire
    if gap.is_finite() && gap >= T::lit(1e-6) && gap < T::one() {
        Ok(())
    } else {
        Err(Error::invalid("gap", "must lie in [1e-6, 1)"))
    }
}

fn gaps_around<T: Scalar>(criticals: &[T], gap: T) -> Vec<(T, T)> {
    let mut gaps: Vec<(T, T)> = criticals
        .iter()
        .filter(|c| **c > T::zero())
        .map(|c| (*c * (T::one() - gap), *c * (T::one() + gap)))
        .collect();
    gaps.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    gaps.dedup();
    gaps
}

fn in_gap<T: Scalar>(x: T, gaps: &[(T, T)]) -> bool {
    gaps.iter().any(|(a, b)| x >= *a && x <= *b)
}

/// Immediate and term treasury leverage against volume.
pub fn elasticity_curve<T: Scalar>(
    c: &ProductiveCombination<T>,
    q_range: (T, T),
    sampling: &Sampling<T>,
) -> Result<CurveGrid<T>> {
    let m = c.viable_margin()?;
    check_gap(sampling.gap)?;
    let (lo, hi) = q_range;
    if !(lo > T::zero()) || hi > c.capacity() {
        return Err(Error::RangeOutsideDomain {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
            limit: c.capacity().to_f64_lossy(),
        });
    }
    let criticals: Vec<T> = Horizon::ALL.iter().map(|h| c.fixed_base(*h) / m).collect();
    let gaps = gaps_around(&criticals, sampling.gap);
    let mut rows = Vec::new();
    for q in abscissas(lo, hi, sampling)? {
        if in_gap(q, &gaps) {
            continue;
        }
        let imm = elasticity_volume(q, c.fixed_base(Horizon::Immediate), m);
        let term = elasticity_volume(q, c.fixed_base(Horizon::Term), m);
        if let (Ok(imm), Ok(term)) = (imm, term) {
            rows.push(vec![q, imm.value(), term.value()]);
        }
    }
    Ok(CurveGrid {
        kind: CurveKind::ElasticityVsQ,
        columns: vec!["q".into(), "immediate".into(), "term".into()],
        rows,
        singularity_gaps: gaps,
    })
}

/// Immediate and term treasury leverage against unit margin, at `volume`.
pub fn margin_elasticity_curve<T: Scalar>(
    c: &ProductiveCombination<T>,
    volume: T,
    m_range: (T, T),
    sampling: &Sampling<T>,
) -> Result<CurveGrid<T>> {
    check_gap(sampling.gap)?;
    if !(volume > T::zero()) {
        return Err(Error::NonPositiveVolume {
            volume: volume.to_f64_lossy(),
        });
    }
    let (lo, hi) = m_range;
    if !(lo >= T::zero()) {
        return Err(Error::EmptyRange {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    let criticals: Vec<T> = Horizon::ALL
        .iter()
        .map(|h| c.fixed_base(*h) / volume)
        .collect();
    let gaps = gaps_around(&criticals, sampling.gap);
    let mut rows = Vec::new();
    for m in abscissas(lo, hi, sampling)? {
        if in_gap(m, &gaps) {
            continue;
        }
        let imm = elasticity_margin(m, c.fixed_base(Horizon::Immediate), volume);
        let term = elasticity_margin(m, c.fixed_base(Horizon::Term), volume);
        if let (Ok(imm), Ok(term)) = (imm, term) {
            rows.push(vec![m, imm.value(), term.value()]);
        }
    }
    Ok(CurveGrid {
        kind: CurveKind::ElasticityVsM,
        columns: vec!["m".into(), "immediate".into(), "term".into()],
        rows,
        singularity_gaps: gaps,
    })
}

/// Zero-treasury contours `m = f/Q`, one per fixed-cost level, clipped to
/// `m_range`. Long format: `fixed, q, m`.
pub fn indifference_contours<T: Scalar>(
    levels: &[T],
    q_range: (T, T),
    m_range: (T, T),
    sampling: &Sampling<T>,
) -> Result<CurveGrid<T>> {
    if levels.is_empty() {
        return Err(Error::invalid("levels", "at least one fixed-cost level"));
    }
    if levels.iter().any(|f| !(f.is_finite() && *f > T::zero())) {
        return Err(Error::invalid("levels", "must be finite and > 0"));
    }
    let (q_lo, q_hi) = q_range;
    let (m_lo, m_hi) = m_range;
    let empty = |lo: T, hi: T| Error::EmptyRange {
        lo: lo.to_f64_lossy(),
        hi: hi.to_f64_lossy(),
    };
    if !(q_lo > T::zero()) {
        return Err(empty(q_lo, q_hi));
    }
    if !(m_lo >= T::zero() && m_lo < m_hi) {
        return Err(empty(m_lo, m_hi));
    }
    let qs = abscissas(q_lo, q_hi, sampling)?;
    let mut rows = Vec::new();
    for f in levels {
        for q in &qs {
            let m = *f / *q;
            if m >= m_lo && m <= m_hi {
                rows.push(vec![*f, *q, m]);
            }
        }
    }
    Ok(CurveGrid {
        kind: CurveKind::IndifferenceContours,
        columns: vec!["fixed".into(), "q".into(), "m".into()],
        rows,
        singularity_gaps: Vec::new(),
    })
}

fn check_cost_range<T: Scalar>(model: &CostBehaviorModel<T>, f_range: (T, T)) -> Result<()> {
    let (lo, hi) = f_range;
    let limit = model.domain_limit();
    if !(lo > T::zero()) || !(hi < limit) {
        return Err(Error::RangeOutsideDomain {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Numeric zone marker: `1` weak response (zone α, `E > -1`), `0` on the
/// `-1` boundary, `-1` strong response (zone β, `E < -1`).
fn zone_marker<T: Scalar>(class: ElasticityClassification) -> T {
    match class {
        ElasticityClassification::Weak | ElasticityClassification::Null => T::one(),
        ElasticityClassification::Boundary => T::zero(),
        ElasticityClassification::Strong => -T::one(),
    }
}

/// `v(f)`, the relative elasticity `E(f)` and its zone marker.
pub fn cost_behavior_curves<T: Scalar>(
    model: &CostBehaviorModel<T>,
    f_range: (T, T),
    sampling: &Sampling<T>,
) -> Result<CurveGrid<T>> {
    check_cost_range(model, f_range)?;
    let mut rows = Vec::new();
    for f in abscissas(f_range.0, f_range.1, sampling)? {
        let e = relative_elasticity_vf(f, model)?;
        let zone = zone_marker(classify_elasticity(e)?);
        rows.push(vec![f, model.unit_variable_cost(f), e.value(), zone]);
    }
    Ok(CurveGrid {
        kind: CurveKind::CostBehavior,
        columns: vec!["f".into(), "v".into(), "elasticity".into(), "zone".into()],
        rows,
        singularity_gaps: Vec::new(),
    })
}

/// Relative elasticity of `v` to `f` alone.
pub fn relative_elasticity_curve<T: Scalar>(
    model: &CostBehaviorModel<T>,
    f_range: (T, T),
    sampling: &Sampling<T>,
) -> Result<CurveGrid<T>> {
    check_cost_range(model, f_range)?;
    let rows = abscissas(f_range.0, f_range.1, sampling)?
        .into_iter()
        .map(|f| Ok(vec![f, relative_elasticity_vf(f, model)?.value()]))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveGrid {
        kind: CurveKind::RelativeElasticityVsF,
        columns: vec!["f".into(), "elasticity".into()],
        rows,
        singularity_gaps: Vec::new(),
    })
}

/// Indifference lines of absolute elasticity from base `(f0, v0)`: for
/// each slope `a`, the relative moves `(Δf/f0, Δv/v0)` along `v = a·f + b`
/// with their constant elasticity `a·f0/v0`. `df_range` is in relative
/// terms (`Δf/f0`). Long format: `slope, df_rel, dv_rel, elasticity`.
pub fn absolute_elasticity_lines<T: Scalar>(
    base: (T, T),
    slopes: &[T],
    df_range: (T, T),
    sampling: &Sampling<T>,
) -> Result<CurveGrid<T>> {
    let (f0, v0) = base;
    if !(f0 > T::zero() && v0 > T::zero()) {
        return Err(Error::ZeroBase);
    }
    if slopes.is_empty() || slopes.iter().any(|a| !a.is_finite()) {
        return Err(Error::invalid("slopes", "at least one finite slope"));
    }
    if !(df_range.0 >= -T::one()) {
        return Err(Error::invalid(
            "df_range",
            "fixed costs cannot fall below zero",
        ));
    }
    let xs = abscissas(df_range.0, df_range.1, sampling)?;
    let mut rows = Vec::new();
    for &a in slopes {
        let label = absolute_elasticity_from_slope(f0, v0, a)?.value();
        for &x in &xs {
            // x = 0 gives -0 for a negative slope
            let dv_rel = a * f0 * x / v0 + T::zero();
            if dv_rel < -T::one() {
                return Err(Error::InfeasiblePath {
                    slope: a.to_f64_lossy(),
                });
            }
            rows.push(vec![a, x, dv_rel, label]);
        }
    }
    Ok(CurveGrid {
        kind: CurveKind::AbsoluteElasticityLines,
        columns: vec![
            "slope".into(),
            "df_rel".into(),
            "dv_rel".into(),
            "elasticity".into(),
        ],
        rows,
        singularity_gaps: Vec::new(),
    })
}
