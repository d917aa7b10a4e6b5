//! Text-level helpers behind the `theory` and `speed` subcommands.

use std::collections::BTreeMap;

use serde::Serialize;

use super::CliError;
use crate::fronts::{estimate_speed, species_label, FitWindow, FrontTrace, SpeedEstimate};
use crate::model::{CoopParams, Model};
use crate::theory::{
    classify_regime, coop_lower_speed, r2_upper_speed, regime_conditions, speed_bounds,
    wave_verdict, SpeedBounds, WaveSpeedVerdict,
};

const PARAM_KEYS: [&str; 6] = ["d1", "d2", "r1", "r2", "b1", "b2"];

/// Parses `d1=1,d2=1,r1=1,r2=0.8,b1=0.2,b2=0.5` (comma or whitespace
/// separated, any order, all six required).
pub fn parse_coop_params(text: &str) -> Result<CoopParams, CliError> {
    let mut seen = BTreeMap::new();
    for item in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::schema("params", format!("expected key=value, got `{item}`")))?;
        let k = k.trim();
        if !PARAM_KEYS.contains(&k) {
            return Err(CliError::schema(k, "unknown parameter"));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::schema(k, format!("not a number: `{v}`")))?;
        if seen.insert(k, v).is_some() {
            return Err(CliError::schema(k, "given twice"));
        }
    }
    let get = |k: &str| seen.get(k).copied().ok_or_else(|| CliError::schema(k, "missing"));
    let p = CoopParams {
        d1: get("d1")?,
        d2: get("d2")?,
        r1: get("r1")?,
        r2: get("r2")?,
        b1: get("b1")?,
        b2: get("b2")?,
    };
    p.validate()
        .map_err(|e| CliError::invariant("params", e.to_string()))?;
    Ok(p)
}

/// Everything the closed-form side says about one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryReport {
    pub params: CoopParams,
    pub coexistence: (f64, f64),
    pub c_star: Option<f64>,
    pub u2_upper: Option<f64>,
    pub regime: &'static str,
    pub conditions: Vec<&'static str>,
    pub bounds: SpeedBounds,
    pub waves: Vec<WaveSpeedVerdict>,
}

pub fn theory_report(p: &CoopParams, speeds: &[f64]) -> TheoryReport {
    TheoryReport {
        params: *p,
        coexistence: p.coexistence(),
        c_star: coop_lower_speed(p).ok(),
        u2_upper: r2_upper_speed(p),
        regime: classify_regime(p).as_str(),
        conditions: regime_conditions(p).iter().map(|t| t.as_str()).collect(),
        bounds: speed_bounds(&Model::Coop(*p)),
        waves: speeds.iter().map(|&c| wave_verdict(p, c)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittedTrace {
    pub species: String,
    pub direction: &'static str,
    pub lambda: f64,
    #[serde(flatten)]
    pub estimate: SpeedEstimate,
}

/// Fits every trace; traces too short to fit are reported as errors.
pub fn fit_traces(traces: &[FrontTrace], window: &FitWindow) -> Result<Vec<FittedTrace>, CliError> {
    traces
        .iter()
        .map(|tr| {
            let estimate = estimate_speed(tr, window).map_err(|e| {
                CliError::invariant(
                    &format!("{}.{}", species_label(tr.species), tr.direction.as_str()),
                    e.to_string(),
                )
            })?;
            Ok(FittedTrace {
                species: species_label(tr.species),
                direction: tr.direction.as_str(),
                lambda: tr.level,
                estimate,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_parse_in_any_order() {
        let p = parse_coop_params("r2=0.8 b1=0.2,b2=0.5, d1=1,d2=1,r1=1").unwrap();
        assert_eq!(p, CoopParams { d1: 1.0, d2: 1.0, r1: 1.0, r2: 0.8, b1: 0.2, b2: 0.5 });
        assert!(parse_coop_params("d1=1").is_err());
        assert!(parse_coop_params("d1=1,d1=2").is_err());
        assert!(parse_coop_params("d1=1,d2=1,r1=1,r2=1,b1=2,b2=1").is_err());
        assert!(parse_coop_params("q=1").is_err());
    }

    #[test]
    fn report_matches_direct_calls() {
        let p = parse_coop_params("d1=1,d2=1,r1=1,r2=0.8,b1=0.2,b2=0.5").unwrap();
        let r = theory_report(&p, &[1.0, 2.5]);
        assert_eq!(r.c_star, Some(2.0));
        assert_eq!(r.regime, "remark_r3");
        assert_eq!(r.waves[1], wave_verdict(&p, 2.5));
    }
}
