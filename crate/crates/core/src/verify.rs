//! Executable checks for ordering, invariant-box and cone-convergence
//! statements, plus named suites that bundle them.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cli::{execute, scenario, CliError};
use crate::fronts::BoundKind;
use crate::model::{CoopParams, FisherParams, Model, ModelError};
use crate::solver::{
    build_grid, integrate_from, FieldState, Grid1D, InitialCondition, SnapshotRecorder,
    SolverError, StepControl,
};
use crate::theory::{
    coop_lower_speed, gamma_roots, regime_conditions, wave_verdict, RegimeTag, TheoryError,
    WaveExistence,
};

/// Allowed node-wise ordering violation.
pub const ORDER_TOL: f64 = 1e-8;
/// Allowed exceedance of the invariant box.
pub const BOX_TOL: f64 = 1e-8;
/// Allowed cone deviation from the coexistence state at finite horizon.
pub const CONVERGENCE_TOL: f64 = 0.05;

pub const SUITES: &[&str] = &["smoke", "full"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub worst_violation: f64,
    /// `(t, x)` of the worst violation, when it is attached to a node.
    pub location: Option<(f64, f64)>,
    pub tolerance: f64,
}

impl PropertyResult {
    pub fn new(name: &str, worst_violation: f64, location: Option<(f64, f64)>, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: worst_violation <= tolerance,
            worst_violation,
            location,
            tolerance,
        }
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("initial data not ordered: species {species} at x={x} differs by {gap}")]
    InitialOrder { species: usize, x: f64, gap: f64 },
    #[error("cone slope c={c} is not below c*={c_star}")]
    ConeHypothesis { c: f64, c_star: f64 },
    #[error("cone at c={c}, t={t} contains no grid node")]
    EmptyCone { c: f64, t: f64 },
    #[error("no snapshot at or after t_tail={0}")]
    Tail(f64),
    #[error("unknown suite `{0}` (known: {known})", known = SUITES.join(", "))]
    UnknownSuite(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Cli(#[from] CliError),
}

/// Expected relation of the first solution to the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Below,
    Above,
}

/// Worst positive part of `a - b` (for `Below`) over all nodes.
fn order_violation(grid: &Grid1D, a: &FieldState, b: &FieldState, order: Order) -> (f64, f64, usize, usize) {
    let mut worst = (0.0, grid.x(0), 0, 0);
    for (k, (ua, ub)) in a.species.iter().zip(&b.species).enumerate() {
        for (i, (&va, &vb)) in ua.iter().zip(ub).enumerate() {
            let gap = match order {
                Order::Below => va - vb,
                Order::Above => vb - va,
            };
            if gap > worst.0 {
                worst = (gap, grid.x(i), k, i);
            }
        }
    }
    worst
}

/// Integrates both initial data and reports the worst node-wise violation of
/// `lower <= upper` over every snapshot.
pub fn comparison_order_check(
    model: &Model,
    lower_ic: &InitialCondition,
    upper_ic: &InitialCondition,
    grid: &Grid1D,
    ctrl: &StepControl,
) -> Result<PropertyResult, VerifyError> {
    comparison_order_check_with(model, lower_ic, upper_ic, Order::Below, grid, ctrl)
}

/// Like [`comparison_order_check`], with the expected relation of `first`
/// to `second` given explicitly.
pub fn comparison_order_check_with(
    model: &Model,
    first: &InitialCondition,
    second: &InitialCondition,
    order: Order,
    grid: &Grid1D,
    ctrl: &StepControl,
) -> Result<PropertyResult, VerifyError> {
    let a0 = FieldState::new(0.0, first.sample(grid)?);
    let b0 = FieldState::new(0.0, second.sample(grid)?);
    let (gap, x, species, _) = order_violation(grid, &a0, &b0, order);
    if gap > 0.0 {
        return Err(VerifyError::InitialOrder { species, x, gap });
    }
    let go = |s: FieldState| -> Result<Vec<FieldState>, SolverError> {
        let mut rec = SnapshotRecorder::default();
        integrate_from(model, s, grid, ctrl, &mut [&mut rec])?;
        Ok(rec.snapshots)
    };
    let (ra, rb) = rayon::join(|| go(a0), || go(b0));
    let (sa, sb) = (ra?, rb?);
    let mut worst = 0.0;
    let mut location = None;
    for (a, b) in sa.iter().zip(&sb) {
        let (gap, x, _, _) = order_violation(grid, a, b, order);
        if gap > worst {
            worst = gap;
            location = Some((a.t, x));
        }
    }
    Ok(PropertyResult::new("comparison.order", worst, location, ORDER_TOL))
}

/// Worst exceedance of `upper` per species and worst negativity across
/// all snapshots.
pub fn bounds_invariant_check(
    name: &str,
    grid: &Grid1D,
    snapshots: &[FieldState],
    upper: &[f64],
) -> PropertyResult {
    let mut worst = 0.0;
    let mut location = None;
    for s in snapshots {
        for (k, u) in s.species.iter().enumerate() {
            let cap = upper.get(k).copied().unwrap_or(f64::INFINITY);
            for (i, &v) in u.iter().enumerate() {
                let gap = (v - cap).max(-v);
                if gap > worst || gap.is_nan() {
                    worst = if gap.is_nan() { f64::INFINITY } else { gap };
                    location = Some((s.t, grid.x(i)));
                }
            }
        }
    }
    PropertyResult::new(name, worst, location, BOX_TOL)
}

/// Largest deviation of the cone infimum and supremum from the coexistence
/// state over snapshots with `t >= t_tail`.
pub fn convergence_to_k_check(
    p: &CoopParams,
    grid: &Grid1D,
    snapshots: &[FieldState],
    c: f64,
    t_tail: f64,
) -> Result<PropertyResult, VerifyError> {
    let c_star = coop_lower_speed(p)?;
    if !(c >= 0.0 && c < c_star) {
        return Err(VerifyError::ConeHypothesis { c, c_star });
    }
    let (k1, k2) = p.coexistence();
    let target = [k1, k2];
    let tail: Vec<&FieldState> = snapshots.iter().filter(|s| s.t >= t_tail - 1e-9).collect();
    if tail.is_empty() {
        return Err(VerifyError::Tail(t_tail));
    }
    let mut worst = 0.0;
    let mut location = None;
    for s in tail {
        let radius = c * s.t;
        if radius < grid.dx {
            return Err(VerifyError::EmptyCone { c, t: s.t });
        }
        for (k, u) in s.species.iter().enumerate().take(2) {
            for (i, &v) in u.iter().enumerate() {
                let x = grid.x(i);
                if x.abs() >= radius {
                    continue;
                }
                let dev = (v - target[k]).abs();
                if dev > worst {
                    worst = dev;
                    location = Some((s.t, x));
                }
            }
        }
    }
    Ok(PropertyResult::new("convergence.cone", worst, location, CONVERGENCE_TOL))
}

fn renamed(mut r: PropertyResult, name: &str) -> PropertyResult {
    r.name = name.to_string();
    r
}

type Property = Box<dyn Fn() -> Result<Vec<PropertyResult>, VerifyError> + Send + Sync>;

fn small_grid() -> Grid1D {
    build_grid(-60.0, 60.0, 601).expect("valid grid")
}

fn bump(amp: Vec<f64>) -> InitialCondition {
    InitialCondition::CompactBump { amp, width: 5.0, smoothing: 0.0 }
}

fn smoke_coop() -> CoopParams {
    CoopParams { d1: 1.0, d2: 1.0, r1: 1.0, r2: 0.8, b1: 0.2, b2: 0.5 }
}

/// Ordering checks on a domain wide enough that no front reaches the ends
/// before `t_end`.
fn order_properties(t_end: f64) -> Vec<Property> {
    let half = 60.0 * (t_end / 15.0).max(1.0).ceil();
    let grid = move || build_grid(-half, half, (10.0 * half) as usize + 1).expect("valid grid");
    let fisher = Model::Fisher(FisherParams { d: 1.0, r: 1.0, k: 1.0 });
    let coop = Model::Coop(smoke_coop());
    let ctrl = move |m: &Model, g: &Grid1D| {
        StepControl::auto(g, m.max_diffusion(), t_end, 1.0, 0.4).map_err(VerifyError::from)
    };
    let (f1, f2) = (fisher, fisher);
    vec![
        Box::new(move || {
            let g = grid();
            let ic = bump(vec![0.5]);
            let r = comparison_order_check(&f1, &ic, &ic, &g, &ctrl(&f1, &g)?)?;
            Ok(vec![renamed(r, "order.identical")])
        }),
        Box::new(move || {
            let g = grid();
            let r = comparison_order_check(&f2, &bump(vec![0.5]), &bump(vec![0.55]), &g, &ctrl(&f2, &g)?)?;
            Ok(vec![renamed(r, "order.fisher_scaled")])
        }),
        Box::new(move || {
            let g = grid();
            let amp = vec![0.5, 0.5];
            let e = coop.upper_box(&amp)?;
            let r = comparison_order_check(
                &coop,
                &bump(amp),
                &InitialCondition::Constant { amp: e },
                &g,
                &ctrl(&coop, &g)?,
            )?;
            Ok(vec![renamed(r, "order.coop_supersolution")])
        }),
    ]
}

fn constant_k_properties() -> Vec<Property> {
    vec![Box::new(|| {
        let p = smoke_coop();
        let model = Model::Coop(p);
        let g = small_grid();
        let (k1, k2) = p.coexistence();
        let ctrl = StepControl::auto(&g, model.max_diffusion(), 20.0, 1.0, 0.4)?;
        let mut rec = SnapshotRecorder::default();
        integrate_from(&model, FieldState::constant(&g, &[k1, k2]), &g, &ctrl, &mut [&mut rec])?;
        let boxed = bounds_invariant_check("bounds.constant_k", &g, &rec.snapshots, &[k1, k2]);
        let conv = convergence_to_k_check(&p, &g, &rec.snapshots, 1.0, 10.0)?;
        Ok(vec![boxed, renamed(conv, "convergence.constant_k")])
    })]
}

/// Deterministic parameter grid for the theory cross-checks.
fn theory_params() -> Vec<CoopParams> {
    let mut out = Vec::new();
    for &d1 in &[0.5, 1.0, 2.0] {
        for &r1 in &[0.5, 1.0, 4.0] {
            for &d2 in &[0.5, 1.0] {
                for &r2 in &[0.3, 0.8, 1.5] {
                    for &(b1, b2) in &[(0.0, 0.0), (0.2, 0.5), (0.9, 0.9)] {
                        out.push(CoopParams { d1, d2, r1, r2, b1, b2 });
                    }
                }
            }
        }
    }
    out
}

/// Root of `d g^2 - c g + r` in `[lo, hi]` by bisection, assuming a sign change.
fn bisect_root(d: f64, r: f64, c: f64, mut lo: f64, mut hi: f64) -> f64 {
    let f = |g: f64| d * g * g - c * g + r;
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn theory_properties() -> Vec<Property> {
    vec![
        Box::new(|| {
            // Roots against bisection around the vertex c / 2d.
            let mut worst: f64 = 0.0;
            for p in theory_params() {
                for j in 0..50 {
                    let c = 0.1 + 0.15 * j as f64;
                    for (d, r) in [(p.d1, p.r1), (p.d2, p.r2)] {
                        let vertex = c / (2.0 * d);
                        match gamma_roots(d, r, c) {
                            Some((a, b)) if c * c > 4.0 * d * r => {
                                let oa = bisect_root(d, r, c, 0.0, vertex);
                                let ob = bisect_root(d, r, c, vertex, c / d);
                                worst = worst.max((a - oa).abs()).max((b - ob).abs());
                            }
                            Some(_) => {}
                            None if c * c < 4.0 * d * r => {}
                            None => worst = f64::INFINITY,
                        }
                    }
                }
            }
            Ok(vec![PropertyResult::new("theory.gamma_roots", worst, None, 1e-10)])
        }),
        Box::new(|| {
            // not_exists exactly below 2 sqrt(d1 r1).
            let mut mismatches = 0.0;
            for p in theory_params() {
                let c1 = 2.0 * (p.d1 * p.r1).sqrt();
                for j in 0..80 {
                    let c = 0.05 + 0.1 * j as f64;
                    let not_exists = wave_verdict(&p, c).verdict == WaveExistence::NotExists;
                    if not_exists != (c < c1) {
                        mismatches += 1.0;
                    }
                }
            }
            Ok(vec![PropertyResult::new("theory.nonexistence_threshold", mismatches, None, 0.0)])
        }),
        Box::new(|| {
            // Regime tags against the raw inequalities, and c* against the
            // isolated second-species speed.
            let mut bad = 0.0;
            for p in theory_params() {
                let tags = regime_conditions(&p);
                let (s1, s2) = ((p.d1 * p.r1).sqrt(), (p.d2 * p.r2).sqrt());
                let same_d = p.d1 == p.d2;
                let r1 = same_d && p.r1 == p.r2;
                let r3 = same_d && s2 < s1 && s1 <= (p.d2 * p.r2 * (1.0 + p.b2)).sqrt();
                let k2 = p.coexistence().1;
                let r2 = p.d1 * p.r1 > p.d2 * p.r2 * k2;
                for (want, tag) in
                    [(r1, RegimeTag::RemarkR1), (r2, RegimeTag::RemarkR2), (r3, RegimeTag::RemarkR3)]
                {
                    if want != tags.contains(&tag) {
                        bad += 1.0;
                    }
                }
                if let Ok(c) = coop_lower_speed(&p) {
                    if c < 2.0 * s2 - 1e-12 {
                        bad += 1.0;
                    }
                }
            }
            Ok(vec![PropertyResult::new("theory.regimes", bad, None, 0.0)])
        }),
    ]
}

/// Scenario-scale runs: box invariant and speed verdicts for every preset,
/// cone convergence for the fastened-invasion preset.
fn scenario_properties() -> Vec<Property> {
    crate::cli::SCENARIOS
        .iter()
        .map(|&name| -> Property {
            Box::new(move || {
                let cfg = scenario(name)?;
                let ex = execute(&cfg)?;
                let mut out = vec![renamed(ex.box_check.clone(), &format!("bounds.{name}"))];
                let mut shortfall: f64 = 0.0;
                for r in &ex.report.records {
                    let speed = r.direction.sign() * r.speed;
                    for v in &r.verdicts {
                        let miss = match v.kind {
                            BoundKind::Lower => (v.bound - v.tolerance) - speed,
                            BoundKind::Upper => speed - (v.bound + v.tolerance),
                        };
                        shortfall = shortfall.max(miss);
                    }
                }
                out.push(PropertyResult::new(&format!("speed.{name}"), shortfall.max(0.0), None, 0.0));
                if let Model::Coop(p) = &cfg.model {
                    if name == "remark_r3" {
                        let conv = convergence_to_k_check(p, &ex.grid, &ex.snapshots, 1.0, 60.0)?;
                        out.push(renamed(conv, &format!("convergence.{name}")));
                    }
                }
                Ok(out)
            })
        })
        .collect()
}

/// Runs the named suite. Properties execute concurrently; results come back
/// in a fixed order regardless of scheduling.
pub fn suite_run(name: &str) -> Result<Vec<PropertyResult>, VerifyError> {
    let mut props: Vec<Property> = match name {
        "smoke" | "full" => Vec::new(),
        other => return Err(VerifyError::UnknownSuite(other.to_string())),
    };
    props.extend(order_properties(if name == "full" { 40.0 } else { 15.0 }));
    props.extend(constant_k_properties());
    props.extend(theory_properties());
    if name == "full" {
        props.extend(scenario_properties());
    }
    let results: Vec<Result<Vec<PropertyResult>, VerifyError>> =
        props.par_iter().map(|p| p()).collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

pub fn results_jsonl(results: &[PropertyResult]) -> String {
    results
        .iter()
        .map(|r| serde_json::to_string(r).expect("result serializes") + "\n")
        .collect()
}

pub fn summary_table(results: &[PropertyResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(4).max(8);
    let mut out = format!("{:<width$}  {:<4}  {:>12}  {:>9}\n", "property", "ok", "violation", "tolerance");
    for r in results {
        let _ = writeln!(
            out,
            "{:<width$}  {:<4}  {:>12.3e}  {:>9.1e}",
            r.name,
            if r.passed { "pass" } else { "FAIL" },
            r.worst_violation,
            r.tolerance
        );
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let _ = writeln!(out, "{} properties, {} failed", results.len(), failed);
    out
}
