//! Front tracking and spreading-speed estimation.
//!
//! Fronts are level-set crossings located by linear interpolation between
//! bracketing nodes. Speeds are least-squares slopes over the late part of
//! a trace, since spreading speeds are only defined asymptotically.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solver::{FieldState, Grid1D, Observer};
use crate::theory::SpeedBounds;

pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontError {
    #[error("speed fit needs at least {need} samples in the window, found {have}")]
    TooFewSamples { have: usize, need: usize },
    #[error("window fraction must lie in (0, 1], got {0}")]
    WindowFraction(f64),
    #[error("cone |x| < {c}*{t} is narrower than one cell")]
    EmptyCone { c: f64, t: f64 },
    #[error("cone slope must be non-negative, got {0}")]
    NegativeSlope(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    /// `+1` for right-moving, `-1` for left-moving fronts.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Left => -1.0,
            Direction::Right => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Direction::Left),
            "right" => Ok(Direction::Right),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

/// Outermost crossing of `level` by `species` on the given side, or `None`
/// if the field never drops below the level towards that side.
pub fn level_position(
    grid: &Grid1D,
    state: &FieldState,
    species: usize,
    level: f64,
    direction: Direction,
) -> Option<f64> {
    let v = &state.species[species];
    let n = v.len();
    match direction {
        Direction::Right => {
            let i = (0..n).rev().find(|&i| v[i] >= level)?;
            if i == n - 1 {
                return None;
            }
            let s = (v[i] - level) / (v[i] - v[i + 1]);
            Some(grid.x(i) + s * (grid.x(i + 1) - grid.x(i)))
        }
        Direction::Left => {
            let i = (0..n).find(|&i| v[i] >= level)?;
            if i == 0 {
                return None;
            }
            let s = (v[i] - level) / (v[i] - v[i - 1]);
            Some(grid.x(i) - s * (grid.x(i) - grid.x(i - 1)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontTrace {
    pub species: usize,
    pub direction: Direction,
    pub level: f64,
    /// `(t, position)`, strictly increasing in `t`.
    pub samples: Vec<(f64, f64)>,
}

impl FrontTrace {
    pub fn new(species: usize, direction: Direction, level: f64) -> Self {
        Self { species, direction, level, samples: Vec::new() }
    }

    /// Appends a sample; out-of-order times are dropped.
    pub fn push(&mut self, t: f64, x: f64) {
        if self.samples.last().is_none_or(|&(last, _)| t > last) {
            self.samples.push((t, x));
        }
    }
}

/// Which part of a trace enters the speed fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    /// Trailing fraction of the samples that is kept.
    pub fraction: f64,
    /// Samples earlier than this are discarded as transient.
    pub min_time: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self { fraction: 0.4, min_time: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedEstimate {
    pub speed: f64,
    pub intercept: f64,
    pub fit_window: (f64, f64),
    pub residual_rms: f64,
    pub n_points: usize,
}

/// Ordinary least squares `x = speed * t + intercept` over the fit window.
pub fn estimate_speed(trace: &FrontTrace, window: &FitWindow) -> Result<SpeedEstimate, FrontError> {
    if !(window.fraction > 0.0 && window.fraction <= 1.0) {
        return Err(FrontError::WindowFraction(window.fraction));
    }
    let n = trace.samples.len();
    let keep = (window.fraction * n as f64).ceil() as usize;
    let pts: Vec<(f64, f64)> = trace.samples[n - keep.min(n)..]
        .iter()
        .copied()
        .filter(|&(t, _)| t >= window.min_time)
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(FrontError::TooFewSamples { have: pts.len(), need: MIN_FIT_POINTS });
    }
    let m = pts.len() as f64;
    let t_mean = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let x_mean = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let (mut stt, mut stx) = (0.0, 0.0);
    for &(t, x) in &pts {
        stt += (t - t_mean) * (t - t_mean);
        stx += (t - t_mean) * (x - x_mean);
    }
    let speed = stx / stt;
    let intercept = x_mean - speed * t_mean;
    let sse: f64 = pts
        .iter()
        .map(|&(t, x)| {
            let r = x - (intercept + speed * t);
            r * r
        })
        .sum();
    Ok(SpeedEstimate {
        speed,
        intercept,
        fit_window: (pts[0].0, pts[pts.len() - 1].0),
        residual_rms: (sse / m).sqrt(),
        n_points: pts.len(),
    })
}

/// Minimum and maximum of `species` over the nodes with `|x| < c t`.
pub fn cone_infimum(
    grid: &Grid1D,
    state: &FieldState,
    species: usize,
    c: f64,
) -> Result<(f64, f64), FrontError> {
    if !(c >= 0.0) {
        return Err(FrontError::NegativeSlope(c));
    }
    let radius = c * state.t;
    if radius < grid.dx {
        return Err(FrontError::EmptyCone { c, t: state.t });
    }
    let v = &state.species[species];
    let (lo, hi) = grid
        .nodes()
        .zip(v)
        .filter(|(x, _)| x.abs() < radius)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, &u)| (lo.min(u), hi.max(u)));
    Ok((lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSample {
    pub t: f64,
    /// Per species.
    pub inf: Vec<f64>,
    pub sup: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeRecord {
    pub c: f64,
    pub samples: Vec<ConeSample>,
}

/// Records level crossings for a fixed set of (species, direction, level).
#[derive(Debug, Clone, Default)]
pub struct FrontRecorder {
    pub traces: Vec<FrontTrace>,
}

impl FrontRecorder {
    /// Tracks both directions of every species at the given levels.
    pub fn both_sides(levels: &[f64]) -> Self {
        let mut traces = Vec::new();
        for (k, &level) in levels.iter().enumerate() {
            for dir in [Direction::Left, Direction::Right] {
                traces.push(FrontTrace::new(k, dir, level));
            }
        }
        Self { traces }
    }

    pub fn trace(&self, species: usize, direction: Direction) -> Option<&FrontTrace> {
        self.traces.iter().find(|t| t.species == species && t.direction == direction)
    }
}

impl Observer for FrontRecorder {
    fn observe(&mut self, grid: &Grid1D, state: &FieldState) {
        for tr in &mut self.traces {
            if let Some(x) = level_position(grid, state, tr.species, tr.level, tr.direction) {
                tr.push(state.t, x);
            }
        }
    }
}

/// Records cone extrema for a set of slopes; empty cones are skipped.
#[derive(Debug, Clone, Default)]
pub struct ConeMonitor {
    pub records: Vec<ConeRecord>,
}

impl ConeMonitor {
    pub fn new(slopes: &[f64]) -> Self {
        Self {
            records: slopes.iter().map(|&c| ConeRecord { c, samples: Vec::new() }).collect(),
        }
    }
}

impl Observer for ConeMonitor {
    fn observe(&mut self, grid: &Grid1D, state: &FieldState) {
        for rec in &mut self.records {
            let extrema: Result<Vec<_>, _> = (0..state.species.len())
                .map(|k| cone_infimum(grid, state, k, rec.c))
                .collect();
            if let Ok(e) = extrema {
                rec.samples.push(ConeSample {
                    t: state.t,
                    inf: e.iter().map(|p| p.0).collect(),
                    sup: e.iter().map(|p| p.1).collect(),
                });
            }
        }
    }
}

/// Allowed shortfall below a lower bound and excess above an upper bound,
/// as fractions of the bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub below: f64,
    pub above: f64,
    pub relative: bool,
}

impl Tolerance {
    pub fn absolute(below: f64, above: f64) -> Self {
        Self { below, above, relative: false }
    }

    pub fn relative(below: f64, above: f64) -> Self {
        Self { below, above, relative: true }
    }

    fn scaled(&self, tol: f64, bound: f64) -> f64 {
        if self.relative {
            tol * bound.abs()
        } else {
            tol
        }
    }
}

impl Default for Tolerance {
    /// Wider below than above: pulled fronts approach their limit from below.
    fn default() -> Self {
        Self::relative(0.05, 0.04)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub kind: BoundKind,
    pub bound: f64,
    pub source: String,
    pub tolerance: f64,
    pub passed: bool,
}

/// One measured front with its estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredFront {
    pub species: usize,
    pub direction: Direction,
    pub level: f64,
    pub estimate: SpeedEstimate,
}

impl MeasuredFront {
    /// Speed in the outward direction (positive for an expanding front).
    pub fn outward_speed(&self) -> f64 {
        self.direction.sign() * self.estimate.speed
    }
}

/// Line record of the speed report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedRecord {
    /// Column label of the species, `u1` or `u2`.
    pub species: String,
    pub direction: Direction,
    pub lambda: f64,
    pub speed: f64,
    pub residual_rms: f64,
    pub window_start: f64,
    pub window_end: f64,
    pub verdicts: Vec<InequalityCheck>,
}

impl SpeedRecord {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadingReport {
    pub records: Vec<SpeedRecord>,
}

impl SpreadingReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(SpeedRecord::passed)
    }

    pub fn to_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("speed record serializes") + "\n")
            .collect()
    }
}

pub fn species_label(k: usize) -> String {
    format!("u{}", k + 1)
}

/// Parses `u1`, `u2`, ... back to a zero-based index.
pub fn parse_species_label(s: &str) -> Option<usize> {
    s.strip_prefix('u')?.parse::<usize>().ok()?.checked_sub(1)
}

/// Compares each measured outward speed with the analytic bounds of its
/// species.
pub fn spreading_verdict(
    fronts: &[MeasuredFront],
    bounds: &SpeedBounds,
    tol: &Tolerance,
) -> SpreadingReport {
    let records = fronts
        .iter()
        .map(|f| {
            let speed = f.outward_speed();
            let mut verdicts = Vec::new();
            if let Some(sb) = bounds.species.get(f.species) {
                if let Some(b) = &sb.lower {
                    let t = tol.scaled(tol.below, b.value);
                    verdicts.push(InequalityCheck {
                        kind: BoundKind::Lower,
                        bound: b.value,
                        source: b.source.clone(),
                        tolerance: t,
                        passed: speed >= b.value - t,
                    });
                }
                if let Some(b) = &sb.upper {
                    let t = tol.scaled(tol.above, b.value);
                    verdicts.push(InequalityCheck {
                        kind: BoundKind::Upper,
                        bound: b.value,
                        source: b.source.clone(),
                        tolerance: t,
                        passed: speed <= b.value + t,
                    });
                }
            }
            SpeedRecord {
                species: species_label(f.species),
                direction: f.direction,
                lambda: f.level,
                speed: f.estimate.speed,
                residual_rms: f.estimate.residual_rms,
                window_start: f.estimate.fit_window.0,
                window_end: f.estimate.fit_window.1,
                verdicts,
            }
        })
        .collect();
    SpreadingReport { records }
}

/// Fits every trace that has enough samples; the rest are skipped.
pub fn measure_all(traces: &[FrontTrace], window: &FitWindow) -> Vec<MeasuredFront> {
    traces
        .iter()
        .filter_map(|tr| {
            estimate_speed(tr, window).ok().map(|estimate| MeasuredFront {
                species: tr.species,
                direction: tr.direction,
                level: tr.level,
                estimate,
            })
        })
        .collect()
}
