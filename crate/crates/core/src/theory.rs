//! Closed-form spreading-speed bounds, traveling-wave speed windows and
//! parameter-regime classification for the cooperative system.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CoopParams, Model, ModelError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("lower-speed formula requires d1*r1 > d2*r2, got d1*r1={d1r1}, d2*r2={d2r2}")]
    HypothesisNotMet { d1r1: f64, d2r2: f64 },
}

/// Linear spreading speed `2 sqrt(d r)` of a KPP-type scalar equation.
pub fn fisher_speed(d: f64, r: f64) -> Result<f64, TheoryError> {
    if !(d > 0.0) {
        return Err(ModelError::NonPositive { name: "d", value: d }.into());
    }
    if !(r > 0.0) {
        return Err(ModelError::NonPositive { name: "r", value: r }.into());
    }
    Ok(2.0 * (d * r).sqrt())
}

/// Common lower bound `min{2 sqrt(d1 r1), 2 sqrt(d2 r2 (1 + b2))}` on the
/// spreading speeds of both species. Only defined when `d1 r1 > d2 r2`.
pub fn coop_lower_speed(p: &CoopParams) -> Result<f64, TheoryError> {
    let (d1r1, d2r2) = (p.d1 * p.r1, p.d2 * p.r2);
    if !(d1r1 > d2r2) {
        return Err(TheoryError::HypothesisNotMet { d1r1, d2r2 });
    }
    Ok((2.0 * d1r1.sqrt()).min(2.0 * (d2r2 * (1.0 + p.b2)).sqrt()))
}

/// Upper bound `2 sqrt(d2 r2 k2)` on the speed of `u2`, applicable when
/// `d1 r1 > d2 r2 k2`. `None` when the condition fails.
pub fn r2_upper_speed(p: &CoopParams) -> Option<f64> {
    let (_, k2) = p.coexistence();
    let d2r2k2 = p.d2 * p.r2 * k2;
    (p.d1 * p.r1 > d2r2k2).then(|| 2.0 * d2r2k2.sqrt())
}

/// Roots of `d g^2 - c g + r = 0`, ordered, or `None` when complex.
///
/// A zero discriminant yields the double root `(g, g)`.
pub fn gamma_roots(d: f64, r: f64, c: f64) -> Option<(f64, f64)> {
    let disc = c * c - 4.0 * d * r;
    if disc < 0.0 {
        return None;
    }
    // q is the larger-magnitude root times d; r/q avoids cancellation.
    let q = 0.5 * (c + disc.sqrt());
    let hi = q / d;
    let lo = r / q;
    Some((lo.min(hi), lo.max(hi)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveExistence {
    Exists,
    NotExists,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveSpeedVerdict {
    pub c: f64,
    pub gamma1: Option<(f64, f64)>,
    pub gamma2: Option<(f64, f64)>,
    pub verdict: WaveExistence,
    pub reason: String,
}

/// Intersection of the open intervals `(a0, a1)` and `(b0, b1)`.
fn open_overlap(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    let (a, b) = (a?, b?);
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    (lo < hi).then_some((lo, hi))
}

/// Three-valued classification of a traveling wave from `(0,0)` to `K` at
/// speed `c`.
///
/// `NotExists` exactly when `c < 2 sqrt(d1 r1)`. `Exists` only when
/// `c > max{2 sqrt(d1 r1), 2 sqrt(d2 r2)}`, the open decay-rate windows of
/// the two species overlap, and one of the structural settings holds
/// (equal coefficients, the fastened-invasion chain, or `d1 >= d2` with
/// `r1 >= r2`). Everything else is `Undetermined`.
pub fn wave_verdict(p: &CoopParams, c: f64) -> WaveSpeedVerdict {
    let gamma1 = gamma_roots(p.d1, p.r1, c);
    let gamma2 = gamma_roots(p.d2, p.r2, c);
    let c1 = 2.0 * (p.d1 * p.r1).sqrt();
    let c2 = 2.0 * (p.d2 * p.r2).sqrt();
    let (verdict, reason) = if c < c1 {
        (WaveExistence::NotExists, "c below the isolated u1 speed".to_string())
    } else if !(c > c1.max(c2)) {
        (
            WaveExistence::Undetermined,
            "c does not exceed both isolated speeds".to_string(),
        )
    } else if open_overlap(gamma1, gamma2).is_none() {
        (WaveExistence::Undetermined, "decay-rate windows do not overlap".to_string())
    } else {
        let conditions = regime_conditions(p);
        let structural = conditions.contains(&RegimeTag::RemarkR1)
            || conditions.contains(&RegimeTag::RemarkR3)
            || (p.d1 >= p.d2 && p.r1 >= p.r2);
        if structural {
            (WaveExistence::Exists, "windows overlap in a covered setting".to_string())
        } else {
            (
                WaveExistence::Undetermined,
                "windows overlap but no sufficient structural condition holds".to_string(),
            )
        }
    };
    WaveSpeedVerdict { c, gamma1, gamma2, verdict, reason }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeTag {
    /// `d1 = d2`, `r1 = r2`: both species share the speed `2 sqrt(d1 r1)`.
    RemarkR1,
    /// `d1 r1 > d2 r2 k2`: two distinct spreading speeds.
    RemarkR2,
    /// `d1 = d2` and `2 sqrt(d2 r2) < 2 sqrt(d1 r1) <= 2 sqrt(d2 r2 (1+b2))`:
    /// `u2` is accelerated to the speed of `u1`.
    RemarkR3,
    TheoremOnly,
    Outside,
}

impl RegimeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeTag::RemarkR1 => "remark_r1",
            RegimeTag::RemarkR2 => "remark_r2",
            RegimeTag::RemarkR3 => "remark_r3",
            RegimeTag::TheoremOnly => "theorem_only",
            RegimeTag::Outside => "outside",
        }
    }
}

/// Every regime condition that holds, in precedence order. Ends with
/// `TheoremOnly` if `d1 r1 > d2 r2`, and is `[Outside]` when nothing holds.
pub fn regime_conditions(p: &CoopParams) -> Vec<RegimeTag> {
    let mut tags = Vec::new();
    if p.d1 == p.d2 && p.r1 == p.r2 {
        tags.push(RegimeTag::RemarkR1);
    }
    let (_, k2) = p.coexistence();
    if p.d1 * p.r1 > p.d2 * p.r2 * k2 {
        tags.push(RegimeTag::RemarkR2);
    }
    let s2 = 2.0 * (p.d2 * p.r2).sqrt();
    let s1 = 2.0 * (p.d1 * p.r1).sqrt();
    let s2b = 2.0 * (p.d2 * p.r2 * (1.0 + p.b2)).sqrt();
    if p.d1 == p.d2 && s2 < s1 && s1 <= s2b {
        tags.push(RegimeTag::RemarkR3);
    }
    if p.d1 * p.r1 > p.d2 * p.r2 {
        tags.push(RegimeTag::TheoremOnly);
    }
    if tags.is_empty() {
        tags.push(RegimeTag::Outside);
    }
    tags
}

pub fn classify_regime(p: &CoopParams) -> RegimeTag {
    regime_conditions(p)[0]
}

/// One bound together with the result it comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub source: String,
}

impl Bound {
    fn new(value: f64, source: &str) -> Self {
        Self { value, source: source.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesBounds {
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
}

/// Per-species analytic speed bounds. `lower <= upper` when both exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedBounds {
    pub species: Vec<SpeciesBounds>,
}

fn tightest(candidates: Vec<Bound>, lower: bool) -> Option<Bound> {
    candidates.into_iter().reduce(|a, b| {
        let keep_a = if lower { a.value >= b.value } else { a.value <= b.value };
        if keep_a {
            a
        } else {
            b
        }
    })
}

/// Analytic bounds for compactly supported data lying below the target
/// state, which is the setting of all presets.
pub fn speed_bounds(model: &Model) -> SpeedBounds {
    match model {
        Model::Fisher(p) => {
            let c = 2.0 * (p.d * p.r).sqrt();
            SpeedBounds {
                species: vec![SpeciesBounds {
                    lower: Some(Bound::new(c, "fisher_kpp")),
                    upper: Some(Bound::new(c, "fisher_kpp")),
                }],
            }
        }
        Model::Cubic(p) => {
            // f(u) >= u(1-u) once nu >= 0, so the linear speed is a lower bound.
            SpeedBounds {
                species: vec![SpeciesBounds {
                    lower: (p.nu >= 0.0)
                        .then(|| Bound::new(2.0 * p.d.sqrt(), "linear_subsolution")),
                    upper: Some(Bound::new(
                        2.0 * (p.d * cubic_growth_ceiling(p.nu)).sqrt(),
                        "kpp_supersolution",
                    )),
                }],
            }
        }
        Model::Coop(p) => {
            let c1 = 2.0 * (p.d1 * p.r1).sqrt();
            let mut lower1 = vec![Bound::new(c1, "isolated_u1")];
            let mut lower2 = vec![Bound::new(2.0 * (p.d2 * p.r2).sqrt(), "isolated_u2")];
            if let Ok(cstar) = coop_lower_speed(p) {
                lower1.push(Bound::new(cstar, "cooperative_lower"));
                lower2.push(Bound::new(cstar, "cooperative_lower"));
            }
            let mut upper1 = Vec::new();
            let mut upper2 = Vec::new();
            let tags = regime_conditions(p);
            if tags.contains(&RegimeTag::RemarkR1) || tags.contains(&RegimeTag::RemarkR3) {
                upper1.push(Bound::new(c1, "wave_comparison"));
                upper2.push(Bound::new(c1, "wave_comparison"));
            }
            if let Some(u) = r2_upper_speed(p) {
                upper2.push(Bound::new(u, "dominated_u2"));
            }
            SpeedBounds {
                species: vec![
                    SpeciesBounds {
                        lower: tightest(lower1, true),
                        upper: tightest(upper1, false),
                    },
                    SpeciesBounds {
                        lower: tightest(lower2, true),
                        upper: tightest(upper2, false),
                    },
                ],
            }
        }
    }
}

/// `max_{0<=u<=1} (1-u)(1+nu u)`, the largest per-capita growth rate of the
/// cubic nonlinearity on `[0, 1]`.
pub fn cubic_growth_ceiling(nu: f64) -> f64 {
    let g = |u: f64| (1.0 - u) * (1.0 + nu * u);
    if nu > 1.0 {
        g((nu - 1.0) / (2.0 * nu))
    } else {
        1.0
    }
}

/// Rigorous upper bound on every species' spreading speed from a linear
/// supersolution, given the suprema of the initial data. Used to size the
/// truncated domain, not as a claim about the true speed.
pub fn envelope_speed(model: &Model, sups: &[f64]) -> Result<f64, ModelError> {
    let boxed = model.upper_box(sups)?;
    Ok(match model {
        Model::Fisher(p) => 2.0 * (p.d * p.r).sqrt(),
        Model::Cubic(p) => 2.0 * (p.d * cubic_growth_ceiling(p.nu)).sqrt(),
        Model::Coop(p) => {
            let s1 = 2.0 * (p.d1 * p.r1 * (1.0 + p.b1 * boxed[1])).sqrt();
            let s2 = 2.0 * (p.d2 * p.r2 * (1.0 + p.b2 * boxed[0])).sqrt();
            s1.max(s2)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CubicParams, FisherParams};

    fn coop(d1: f64, r1: f64, d2: f64, r2: f64, b1: f64, b2: f64) -> CoopParams {
        CoopParams::new(d1, d2, r1, r2, b1, b2).unwrap()
    }

    #[test]
    fn fisher_speed_examples() {
        assert_eq!(fisher_speed(1.0, 1.0).unwrap(), 2.0);
        assert_eq!(fisher_speed(1.0, 4.0).unwrap(), 4.0);
        assert_eq!(fisher_speed(2.0, 0.5).unwrap(), 2.0);
        assert!(fisher_speed(0.0, 1.0).is_err());
        assert!(fisher_speed(1.0, -2.0).is_err());
    }

    #[test]
    fn coop_lower_speed_examples() {
        let c = coop_lower_speed(&coop(1.0, 1.0, 1.0, 0.8, 0.2, 0.5)).unwrap();
        assert_eq!(c, 2.0);
        let c = coop_lower_speed(&coop(1.0, 4.0, 1.0, 0.5, 0.2, 0.5)).unwrap();
        assert!((c - 2.0 * 0.75f64.sqrt()).abs() < 1e-15);
        assert!((c - 1.7320508075688772).abs() < 1e-12);
        assert!(matches!(
            coop_lower_speed(&coop(1.0, 1.0, 1.0, 1.0, 0.2, 0.5)),
            Err(TheoryError::HypothesisNotMet { .. })
        ));
    }

    #[test]
    fn r2_upper_speed_examples() {
        let u = r2_upper_speed(&coop(1.0, 4.0, 1.0, 0.5, 0.2, 0.5)).unwrap();
        assert!((u - 2.0 * (5.0f64 / 6.0).sqrt()).abs() < 1e-14);
        assert!((u - 1.8257418583505538).abs() < 1e-12);
        assert_eq!(r2_upper_speed(&coop(1.0, 1.0, 1.0, 0.8, 0.2, 0.5)), None);
        let tiny = r2_upper_speed(&coop(1.0, 4.0, 1.0, 0.5, 1e-9, 1e-9)).unwrap();
        assert!((tiny - 2.0 * 0.5f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn gamma_roots_examples() {
        assert_eq!(gamma_roots(1.0, 1.0, 2.5), Some((0.5, 2.0)));
        assert_eq!(gamma_roots(1.0, 1.0, 2.0), Some((1.0, 1.0)));
        assert_eq!(gamma_roots(1.0, 1.0, 1.9), None);
    }

    #[test]
    fn wave_verdict_examples() {
        let v = wave_verdict(&coop(1.0, 1.0, 1.0, 1.0, 0.3, 0.3), 2.5);
        assert_eq!(v.verdict, WaveExistence::Exists);
        assert_eq!(v.gamma1, Some((0.5, 2.0)));
        assert_eq!(v.gamma2, Some((0.5, 2.0)));

        let v = wave_verdict(&coop(1.0, 1.0, 1.0, 1.5625, 0.3, 0.3), 2.5);
        assert_eq!(v.gamma2, Some((1.25, 1.25)));
        assert_eq!(v.verdict, WaveExistence::Undetermined);

        let v = wave_verdict(&coop(1.0, 1.0, 0.7, 0.3, 0.3, 0.3), 1.0);
        assert_eq!(v.verdict, WaveExistence::NotExists);
    }

    #[test]
    fn regime_examples() {
        assert_eq!(classify_regime(&coop(1.0, 1.0, 1.0, 1.0, 0.4, 0.9)), RegimeTag::RemarkR1);
        assert_eq!(classify_regime(&coop(1.0, 4.0, 1.0, 0.5, 0.2, 0.5)), RegimeTag::RemarkR2);
        assert_eq!(classify_regime(&coop(1.0, 1.0, 1.0, 0.8, 0.2, 0.5)), RegimeTag::RemarkR3);
        assert_eq!(classify_regime(&coop(1.0, 1.0, 2.0, 0.45, 0.2, 0.5)), RegimeTag::TheoremOnly);
        assert_eq!(classify_regime(&coop(1.0, 0.5, 1.0, 1.0, 0.2, 0.5)), RegimeTag::Outside);
    }

    #[test]
    fn preset_bounds() {
        let b = speed_bounds(&Model::Coop(coop(1.0, 1.0, 1.0, 0.8, 0.2, 0.5)));
        for s in &b.species {
            assert_eq!(s.lower.as_ref().unwrap().value, 2.0);
            assert_eq!(s.upper.as_ref().unwrap().value, 2.0);
        }
        let b = speed_bounds(&Model::Coop(coop(1.0, 4.0, 1.0, 0.5, 0.2, 0.5)));
        assert_eq!(b.species[0].lower.as_ref().unwrap().value, 4.0);
        assert!(b.species[0].upper.is_none());
        let l2 = b.species[1].lower.as_ref().unwrap();
        assert_eq!(l2.source, "cooperative_lower");
        assert!((l2.value - 1.7320508075688772).abs() < 1e-12);
        let u2 = b.species[1].upper.as_ref().unwrap();
        assert!((u2.value - 1.8257418583505538).abs() < 1e-12);

        let b = speed_bounds(&Model::Fisher(FisherParams::new(1.0, 1.0, 1.0).unwrap()));
        assert_eq!(b.species[0].lower.as_ref().unwrap().value, 2.0);
    }

    #[test]
    fn cubic_ceiling() {
        assert_eq!(cubic_growth_ceiling(0.5), 1.0);
        assert!((cubic_growth_ceiling(4.0) - 1.5625).abs() < 1e-15);
        let m = Model::Cubic(CubicParams::new(1.0, 4.0).unwrap());
        assert!((envelope_speed(&m, &[0.5]).unwrap() - 2.5).abs() < 1e-15);
    }
}
