//! Cartesian parameter sweeps over any numeric configuration key.
//!
//! A sweep file holds base configuration keys (or `sweep.scenario = NAME`
//! to start from a preset), one `sweep.axis.<key> = [..]` list per axis and
//! optionally `sweep.jobs`.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use toml::Value;

use super::config::{parse_flat_str, read_flat, FlatConfig, RunConfig};
use super::run::{fmt_num, run};
use super::scenario::scenario;
use super::CliError;
use crate::model::Model;
use crate::theory::{classify_regime, speed_bounds};

const AXIS_PREFIX: &str = "sweep.axis.";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: FlatConfig,
    pub axes: Vec<(String, Vec<f64>)>,
    pub jobs: usize,
}

impl SweepSpec {
    /// Every combination of axis values, first axis slowest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.axes.iter().fold(vec![Vec::new()], |acc, (_, values)| {
            acc.into_iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect()
        })
    }

    /// Subdirectory name; fixed six-decimal formatting keeps names unique
    /// and joinable with the table.
    pub fn point_name(&self, values: &[f64]) -> String {
        self.axes
            .iter()
            .zip(values)
            .map(|((k, _), v)| format!("{k}={v:.6}"))
            .collect::<Vec<_>>()
            .join("_")
    }

    pub fn config_at(&self, values: &[f64]) -> Result<RunConfig, CliError> {
        let mut flat = self.base.clone();
        for ((k, _), &v) in self.axes.iter().zip(values) {
            flat.insert(k.clone(), Value::Float(v));
        }
        RunConfig::from_flat(&flat)
    }
}

pub fn parse_sweep_str(text: &str) -> Result<SweepSpec, CliError> {
    build_spec(parse_flat_str(text, "<string>")?)
}

pub fn parse_sweep(path: &Path) -> Result<SweepSpec, CliError> {
    build_spec(read_flat(path)?)
}

fn build_spec(flat: FlatConfig) -> Result<SweepSpec, CliError> {
    let mut base = FlatConfig::new();
    if let Some(v) = flat.get("sweep.scenario") {
        let Value::String(name) = v else {
            return Err(CliError::schema("sweep.scenario", "expected a scenario name"));
        };
        base = scenario(name)?.to_flat();
    }
    let mut axes = Vec::new();
    let mut jobs = 1;
    for (k, v) in flat {
        if let Some(key) = k.strip_prefix(AXIS_PREFIX) {
            let Value::Array(items) = v else {
                return Err(CliError::schema(&k, "expected a list of numbers"));
            };
            let values = items
                .iter()
                .map(|i| match i {
                    Value::Float(x) => Ok(*x),
                    Value::Integer(n) => Ok(*n as f64),
                    _ => Err(CliError::schema(&k, "expected numbers")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if values.is_empty() {
                return Err(CliError::schema(&k, "axis needs at least one value"));
            }
            axes.push((key.to_string(), values));
        } else if k == "sweep.jobs" {
            match v {
                Value::Integer(n) if n >= 1 => jobs = n as usize,
                _ => return Err(CliError::schema(&k, "expected a positive integer")),
            }
        } else if k != "sweep.scenario" {
            base.insert(k, v);
        }
    }
    if axes.is_empty() {
        return Err(CliError::schema("sweep.axis", "at least one axis is required"));
    }
    Ok(SweepSpec { base, axes, jobs })
}

/// One row of the aggregate table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub point: String,
    pub values: Vec<f64>,
    /// `ok`, `invalid: ...` or `failed: ...`.
    pub status: String,
    /// Right-front outward speed per species.
    pub speeds: Vec<Option<f64>>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
    pub regime: Option<String>,
    pub verdict: Option<bool>,
}

impl SweepRow {
    fn status_only(point: String, values: Vec<f64>, status: String) -> Self {
        Self {
            point,
            values,
            status,
            speeds: vec![],
            lower: vec![],
            upper: vec![],
            regime: None,
            verdict: None,
        }
    }
}

fn run_point(spec: &SweepSpec, values: &[f64], out: &Path) -> SweepRow {
    let point = spec.point_name(values);
    let cfg = match spec.config_at(values) {
        Ok(c) => c,
        Err(e) => return SweepRow::status_only(point, values.to_vec(), format!("invalid: {e}")),
    };
    let outcome = match run(&cfg, &out.join(&point)) {
        Ok(o) => o,
        Err(e) => return SweepRow::status_only(point, values.to_vec(), format!("failed: {e}")),
    };
    let ex = outcome.execution;
    let bounds = speed_bounds(&cfg.model);
    let m = cfg.model.species();
    SweepRow {
        point,
        values: values.to_vec(),
        status: "ok".into(),
        speeds: (0..m).map(|k| ex.speed(k)).collect(),
        lower: bounds.species.iter().map(|b| b.lower.as_ref().map(|x| x.value)).collect(),
        upper: bounds.species.iter().map(|b| b.upper.as_ref().map(|x| x.value)).collect(),
        regime: match &cfg.model {
            Model::Coop(p) => Some(classify_regime(p).as_str().to_string()),
            _ => None,
        },
        verdict: Some(ex.passed()),
    }
}

/// Runs every point (at most `jobs` at a time), one subdirectory each, and
/// writes `sweep.csv` once all points are done. Failed points are recorded
/// in their row and do not stop the sweep.
pub fn sweep(spec: &SweepSpec, out: &Path, jobs: Option<usize>) -> Result<Vec<SweepRow>, CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(spec.jobs).max(1))
        .build()
        .map_err(|e| CliError::invariant("sweep.jobs", e.to_string()))?;
    let points = spec.points();
    let rows: Vec<SweepRow> =
        pool.install(|| points.par_iter().map(|p| run_point(spec, p, out)).collect());
    let path = out.join("sweep.csv");
    std::fs::write(&path, render_table(spec, &rows)).map_err(|e| CliError::io(&path, e))?;
    Ok(rows)
}

fn cell(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

fn render_table(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut out = String::from("point,status");
    for (k, _) in &spec.axes {
        let _ = write!(out, ",{k}");
    }
    out.push_str(",speed_u1,speed_u2,lower_u1,upper_u1,lower_u2,upper_u2,regime,verdict\n");
    for r in rows {
        let status = r.status.replace([',', '\n'], ";");
        let _ = write!(out, "{},{status}", r.point);
        for v in &r.values {
            let _ = write!(out, ",{}", fmt_num(*v));
        }
        let at = |v: &[Option<f64>], k: usize| cell(v.get(k).copied().flatten());
        let _ = writeln!(
            out,
            ",{},{},{},{},{},{},{},{}",
            at(&r.speeds, 0),
            at(&r.speeds, 1),
            at(&r.lower, 0),
            at(&r.upper, 0),
            at(&r.lower, 1),
            at(&r.upper, 1),
            r.regime.clone().unwrap_or_default(),
            r.verdict.map(|v| if v { "pass" } else { "fail" }).unwrap_or_default()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = r#"
sweep.scenario = "remark_r3"
sweep.jobs = 2
sweep.axis.model.b2 = [0.0, 0.5]
"#;

    #[test]
    fn parses_axes_and_scenario_base() {
        let s = parse_sweep_str(SPEC).unwrap();
        assert_eq!(s.axes, vec![("model.b2".to_string(), vec![0.0, 0.5])]);
        assert_eq!(s.jobs, 2);
        assert_eq!(s.base.get("model.r2"), Some(&Value::Float(0.8)));
        assert_eq!(s.point_name(&[0.5]), "model.b2=0.500000");
    }

    #[test]
    fn cartesian_product_order() {
        let s = parse_sweep_str(
            "sweep.scenario = \"remark_r3\"\nsweep.axis.model.b1 = [0.1, 0.2]\nsweep.axis.model.b2 = [1, 2, 3]\n",
        )
        .unwrap();
        let pts = s.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![0.1, 1.0]);
        assert_eq!(pts[5], vec![0.2, 3.0]);
    }

    #[test]
    fn missing_axes_rejected() {
        assert!(parse_sweep_str("sweep.scenario = \"fisher\"\n").is_err());
        assert!(parse_sweep_str("sweep.scenario = \"nope\"\nsweep.axis.model.d = [1]\n").is_err());
    }
}
