//! Method-of-lines integrator on a truncated uniform grid.
//!
//! Forward Euler in time, second-order central differences in space, and a
//! homogeneous Neumann (mirror) condition at both ends. Negative undershoot
//! is clamped to zero and counted.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fronts::{level_position, Direction};
use crate::model::{Model, ModelError};
use crate::theory;

/// A front closer than this many cells to a boundary marks the run.
pub const BOUNDARY_CELLS: f64 = 10.0;
/// Required free distance ahead of the envelope front at `t_end`, in cells.
pub const MARGIN_CELLS: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("degenerate grid: x_min={x_min}, x_max={x_max}, n={n} (need x_min < x_max and n >= 3)")]
    Grid { x_min: f64, x_max: f64, n: usize },
    #[error("time step {dt} violates the stability limit {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("invalid step control: {0}")]
    Control(String),
    #[error("invalid initial condition: {0}")]
    Initial(String),
    #[error("length mismatch: expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("expected {expected} species, got {got}")]
    SpeciesCount { expected: usize, got: usize },
    #[error("non-finite value in species {species} at node {node} after step {step} (t={t})")]
    NonFinite { species: usize, node: usize, step: u64, t: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub dx: f64,
}

pub fn build_grid(x_min: f64, x_max: f64, n: usize) -> Result<Grid1D, SolverError> {
    if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() || n < 3 {
        return Err(SolverError::Grid { x_min, x_max, n });
    }
    Ok(Grid1D { x_min, x_max, n, dx: (x_max - x_min) / (n - 1) as f64 })
}

impl Grid1D {
    /// Node coordinate, measured from the domain centre so that symmetric
    /// domains give exactly mirror-symmetric nodes.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        let centre = 0.5 * (self.x_min + self.x_max);
        let half = 0.5 * (self.x_max - self.x_min);
        let m = (self.n - 1) as f64;
        centre + half * ((2.0 * i as f64 - m) / m)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.x(i))
    }
}

/// Node values of every species at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub t: f64,
    pub species: Vec<Vec<f64>>,
}

impl FieldState {
    pub fn new(t: f64, species: Vec<Vec<f64>>) -> Self {
        Self { t, species }
    }

    pub fn constant(grid: &Grid1D, values: &[f64]) -> Self {
        Self {
            t: 0.0,
            species: values.iter().map(|&v| vec![v; grid.n]).collect(),
        }
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn sup(&self) -> Vec<f64> {
        self.species
            .iter()
            .map(|s| s.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }
}

/// Kinetics plus diffusion coefficients: what the integrator needs from a model.
pub trait Kinetics {
    fn species(&self) -> usize;
    fn diffusion(&self, k: usize) -> f64;
    /// Reaction rates at one node. `u` and `out` have `species()` entries.
    fn react(&self, u: &[f64], out: &mut [f64]);
    /// Stable state behind an invading front; `None` for pure transport.
    fn target(&self) -> Option<Vec<f64>> {
        None
    }
    /// Upper bound on any spreading speed given the data suprema.
    fn envelope_speed(&self, _sups: &[f64]) -> Option<f64> {
        None
    }

    fn max_diffusion(&self) -> f64 {
        (0..self.species()).map(|k| self.diffusion(k)).fold(0.0, f64::max)
    }
}

impl Kinetics for Model {
    fn species(&self) -> usize {
        Model::species(self)
    }

    #[inline]
    fn diffusion(&self, k: usize) -> f64 {
        match (self, k) {
            (Model::Coop(p), 0) => p.d1,
            (Model::Coop(p), _) => p.d2,
            (Model::Fisher(p), _) => p.d,
            (Model::Cubic(p), _) => p.d,
        }
    }

    #[inline]
    fn react(&self, u: &[f64], out: &mut [f64]) {
        Model::react(self, u, out)
    }

    fn target(&self) -> Option<Vec<f64>> {
        Some(Model::target(self))
    }

    fn envelope_speed(&self, sups: &[f64]) -> Option<f64> {
        let sups: Vec<f64> = sups.iter().map(|s| s.max(f64::MIN_POSITIVE)).collect();
        theory::envelope_speed(self, &sups).ok()
    }
}

pub fn cfl_max_dt(grid: &Grid1D, d_max: f64, safety: f64) -> f64 {
    safety * grid.dx * grid.dx / (2.0 * d_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: f64,
    pub safety: f64,
}

impl StepControl {
    /// Picks the largest stable step that divides `snapshot_every` evenly.
    pub fn auto(
        grid: &Grid1D,
        d_max: f64,
        t_end: f64,
        snapshot_every: f64,
        safety: f64,
    ) -> Result<Self, SolverError> {
        if !(snapshot_every > 0.0) {
            return Err(SolverError::Control(format!(
                "snapshot_every must be positive, got {snapshot_every}"
            )));
        }
        if !(safety > 0.0 && safety <= 1.0) {
            return Err(SolverError::Control(format!("safety must lie in (0, 1], got {safety}")));
        }
        let limit = cfl_max_dt(grid, d_max, safety);
        let per_snapshot = (snapshot_every / limit - 1e-9).ceil().max(1.0);
        let ctrl = Self { dt: snapshot_every / per_snapshot, t_end, snapshot_every, safety };
        ctrl.validate(grid, d_max)?;
        Ok(ctrl)
    }

    pub fn validate(&self, grid: &Grid1D, d_max: f64) -> Result<(), SolverError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SolverError::Control(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(SolverError::Control(format!(
                "t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        if !(self.snapshot_every > 0.0) {
            return Err(SolverError::Control(format!(
                "snapshot_every must be positive, got {}",
                self.snapshot_every
            )));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(SolverError::Control(format!(
                "safety must lie in (0, 1], got {}",
                self.safety
            )));
        }
        let limit = cfl_max_dt(grid, d_max, self.safety);
        if self.dt > limit * (1.0 + 1e-12) {
            return Err(SolverError::Cfl { dt: self.dt, limit });
        }
        Ok(())
    }

    pub fn total_steps(&self) -> u64 {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as u64
    }

    pub fn steps_per_snapshot(&self) -> u64 {
        ((self.snapshot_every / self.dt).round() as u64).max(1)
    }
}

/// Initial data, one amplitude per species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// `amp` on `|x| <= width`, cosine taper to zero over `smoothing`.
    CompactBump { amp: Vec<f64>, width: f64, smoothing: f64 },
    Constant { amp: Vec<f64> },
    /// `amp` for `x <= position`, zero beyond.
    Step { amp: Vec<f64>, position: f64 },
    /// Piecewise-linear table; zero outside its x-range.
    CustomTable { x: Vec<f64>, values: Vec<Vec<f64>> },
}

impl InitialCondition {
    pub fn species(&self) -> usize {
        match self {
            InitialCondition::CompactBump { amp, .. }
            | InitialCondition::Constant { amp }
            | InitialCondition::Step { amp, .. } => amp.len(),
            InitialCondition::CustomTable { values, .. } => values.len(),
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::Initial(m));
        match self {
            InitialCondition::CompactBump { amp, width, smoothing } => {
                check_amps(amp)?;
                if !(*width > 0.0) {
                    return bad(format!("bump width must be positive, got {width}"));
                }
                if !(*smoothing >= 0.0) {
                    return bad(format!("smoothing must be non-negative, got {smoothing}"));
                }
            }
            InitialCondition::Constant { amp } | InitialCondition::Step { amp, .. } => {
                check_amps(amp)?
            }
            InitialCondition::CustomTable { x, values } => {
                if x.len() < 2 {
                    return bad("table needs at least two rows".into());
                }
                if x.windows(2).any(|w| !(w[0] < w[1])) {
                    return bad("table x column must be strictly increasing".into());
                }
                if values.is_empty() || values.iter().any(|v| v.len() != x.len()) {
                    return bad("table columns must match the x column length".into());
                }
                if values.iter().flatten().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return bad("table values must be finite and non-negative".into());
                }
            }
        }
        Ok(())
    }

    /// Node values per species on `grid`.
    pub fn sample(&self, grid: &Grid1D) -> Result<Vec<Vec<f64>>, SolverError> {
        self.validate()?;
        match self {
            InitialCondition::CompactBump { amp, width, smoothing } => amp
                .iter()
                .map(|&a| init_compact_bump(grid, a, *width, *smoothing))
                .collect(),
            InitialCondition::Constant { amp } => {
                Ok(amp.iter().map(|&a| vec![a; grid.n]).collect())
            }
            InitialCondition::Step { amp, position } => Ok(amp
                .iter()
                .map(|&a| grid.nodes().map(|x| if x <= *position { a } else { 0.0 }).collect())
                .collect()),
            InitialCondition::CustomTable { x, values } => Ok(values
                .iter()
                .map(|col| grid.nodes().map(|xi| interpolate(x, col, xi)).collect())
                .collect()),
        }
    }
}

fn check_amps(amp: &[f64]) -> Result<(), SolverError> {
    if amp.is_empty() || amp.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(SolverError::Initial(format!("amplitudes must be positive, got {amp:?}")));
    }
    Ok(())
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let j = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let s = (x - x0) / (x1 - x0);
    ys[j - 1] + s * (ys[j] - ys[j - 1])
}

/// Plateau of height `amp` on `|x| <= w`, cosine taper of width `sigma`,
/// exactly zero for `|x| >= w + sigma`.
pub fn init_compact_bump(
    grid: &Grid1D,
    amp: f64,
    w: f64,
    sigma: f64,
) -> Result<Vec<f64>, SolverError> {
    if !(amp > 0.0) || !(w > 0.0) || !(sigma >= 0.0) {
        return Err(SolverError::Initial(format!(
            "bump needs amp > 0, w > 0, sigma >= 0; got amp={amp}, w={w}, sigma={sigma}"
        )));
    }
    let edge = w + sigma;
    if -edge < grid.x_min || edge > grid.x_max {
        return Err(SolverError::Initial(format!(
            "bump support [-{edge}, {edge}] exceeds the domain [{}, {}]",
            grid.x_min, grid.x_max
        )));
    }
    Ok(grid
        .nodes()
        .map(|x| {
            let a = x.abs();
            if a <= w {
                amp
            } else if a >= edge {
                0.0
            } else {
                0.5 * amp * (1.0 + (std::f64::consts::PI * (a - w) / sigma).cos())
            }
        })
        .collect())
}

#[inline]
fn second_difference(v: &[f64], i: usize, inv_dx2: f64) -> f64 {
    let n = v.len();
    let (left, right) = if i == 0 {
        (v[1], v[1])
    } else if i == n - 1 {
        (v[n - 2], v[n - 2])
    } else {
        (v[i - 1], v[i + 1])
    };
    ((left + right) - 2.0 * v[i]) * inv_dx2
}

/// Second differences with mirror (Neumann) ends.
pub fn laplacian_apply(grid: &Grid1D, values: &[f64]) -> Result<Vec<f64>, SolverError> {
    if values.len() != grid.n {
        return Err(SolverError::Length { expected: grid.n, got: values.len() });
    }
    let inv_dx2 = 1.0 / (grid.dx * grid.dx);
    Ok((0..grid.n).map(|i| second_difference(values, i, inv_dx2)).collect())
}

/// Trapezoidal mass; conserved exactly by the mirror-boundary Laplacian.
pub fn mass(grid: &Grid1D, values: &[f64]) -> f64 {
    let n = values.len();
    let inner: f64 = values[1..n - 1].iter().sum();
    (inner + 0.5 * (values[0] + values[n - 1])) * grid.dx
}

/// Reusable buffers for in-place stepping.
struct Stepper {
    next: Vec<Vec<f64>>,
    diffusion: Vec<f64>,
    inv_dx2: f64,
}

impl Stepper {
    fn new<K: Kinetics + ?Sized>(model: &K, grid: &Grid1D) -> Self {
        let m = model.species();
        Self {
            next: vec![vec![0.0; grid.n]; m],
            diffusion: (0..m).map(|k| model.diffusion(k)).collect(),
            inv_dx2: 1.0 / (grid.dx * grid.dx),
        }
    }

    /// Advances `cur` by `dt`; returns the number of clamped nodes.
    fn advance<K: Kinetics + ?Sized>(
        &mut self,
        model: &K,
        cur: &mut Vec<Vec<f64>>,
        dt: f64,
        step: u64,
        t: f64,
    ) -> Result<u64, SolverError> {
        let m = cur.len();
        let n = cur[0].len();
        let mut u = [0.0f64; 4];
        let mut rate = [0.0f64; 4];
        let mut clamps = 0;
        for i in 0..n {
            for k in 0..m {
                u[k] = cur[k][i];
            }
            model.react(&u[..m], &mut rate[..m]);
            for k in 0..m {
                let lap = second_difference(&cur[k], i, self.inv_dx2);
                let mut v = u[k] + dt * (self.diffusion[k] * lap + rate[k]);
                if !v.is_finite() {
                    return Err(SolverError::NonFinite { species: k, node: i, step, t });
                }
                if v < 0.0 {
                    v = 0.0;
                    clamps += 1;
                }
                self.next[k][i] = v;
            }
        }
        std::mem::swap(cur, &mut self.next);
        Ok(clamps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepStats {
    pub clamped: u64,
}

fn check_state<K: Kinetics + ?Sized>(
    model: &K,
    grid: &Grid1D,
    state: &FieldState,
) -> Result<(), SolverError> {
    if state.species.len() != model.species() {
        return Err(SolverError::SpeciesCount {
            expected: model.species(),
            got: state.species.len(),
        });
    }
    for s in &state.species {
        if s.len() != grid.n {
            return Err(SolverError::Length { expected: grid.n, got: s.len() });
        }
    }
    Ok(())
}

/// One forward-Euler step `u += dt (d u_xx + f(u))`, clamped at zero.
pub fn step_explicit<K: Kinetics + ?Sized>(
    model: &K,
    grid: &Grid1D,
    state: &FieldState,
    dt: f64,
    safety: f64,
) -> Result<(FieldState, StepStats), SolverError> {
    check_state(model, grid, state)?;
    let limit = cfl_max_dt(grid, model.max_diffusion(), safety);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(SolverError::Cfl { dt, limit });
    }
    let mut stepper = Stepper::new(model, grid);
    let mut cur = state.species.clone();
    let clamped = stepper.advance(model, &mut cur, dt, 1, state.t + dt)?;
    Ok((FieldState::new(state.t + dt, cur), StepStats { clamped }))
}

/// Receives the state on the snapshot schedule.
pub trait Observer {
    fn observe(&mut self, grid: &Grid1D, state: &FieldState);
}

/// Keeps every snapshot in memory.
#[derive(Debug, Default, Clone)]
pub struct SnapshotRecorder {
    pub snapshots: Vec<FieldState>,
}

impl Observer for SnapshotRecorder {
    fn observe(&mut self, _grid: &Grid1D, state: &FieldState) {
        self.snapshots.push(state.clone());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub step: u64,
    pub clamp_count: u64,
    pub boundary_contaminated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub final_state: FieldState,
    pub steps: u64,
    pub clamp_count: u64,
    /// A front came within `BOUNDARY_CELLS` cells of an end of the domain.
    pub boundary_contaminated: bool,
    /// The domain leaves `MARGIN_CELLS` cells ahead of the envelope front.
    pub domain_margin_ok: bool,
    pub diagnostics: Vec<DiagnosticRecord>,
}

impl RunSummary {
    pub fn flagged(&self) -> bool {
        self.boundary_contaminated || !self.domain_margin_ok
    }
}

fn near_boundary<K: Kinetics + ?Sized>(model: &K, grid: &Grid1D, state: &FieldState) -> bool {
    let Some(target) = model.target() else {
        return false;
    };
    let margin = BOUNDARY_CELLS * grid.dx;
    (0..state.species.len()).any(|k| {
        let level = 0.5 * target[k];
        let right = level_position(grid, state, k, level, Direction::Right)
            .is_some_and(|x| x > grid.x_max - margin);
        let left = level_position(grid, state, k, level, Direction::Left)
            .is_some_and(|x| x < grid.x_min + margin);
        right || left
    })
}

/// Whether the free space on each side of the initial support exceeds the
/// envelope travel distance plus `MARGIN_CELLS` cells. Sides where the data
/// already reach the boundary are not checked.
fn domain_margin_ok<K: Kinetics + ?Sized>(
    model: &K,
    grid: &Grid1D,
    state: &FieldState,
    t_end: f64,
) -> bool {
    let Some(speed) = model.envelope_speed(&state.sup()) else {
        return true;
    };
    let need = speed * t_end + MARGIN_CELLS * grid.dx;
    let occupied = |i: usize| state.species.iter().any(|s| s[i] > 0.0);
    let Some(first) = (0..grid.n).find(|&i| occupied(i)) else {
        return true;
    };
    let last = (0..grid.n).rev().find(|&i| occupied(i)).unwrap_or(first);
    let left_ok = first == 0 || grid.x(first) - grid.x_min >= need;
    let right_ok = last == grid.n - 1 || grid.x_max - grid.x(last) >= need;
    left_ok && right_ok
}

/// Integrates from the initial condition to `ctrl.t_end`, calling every
/// observer at `t = 0`, on each snapshot and at the final time.
pub fn integrate<K: Kinetics + ?Sized>(
    model: &K,
    ic: &InitialCondition,
    grid: &Grid1D,
    ctrl: &StepControl,
    observers: &mut [&mut dyn Observer],
) -> Result<RunSummary, SolverError> {
    let species = ic.sample(grid)?;
    integrate_from(model, FieldState::new(0.0, species), grid, ctrl, observers)
}

/// Same as [`integrate`] but starting from explicit node values.
pub fn integrate_from<K: Kinetics + ?Sized>(
    model: &K,
    initial: FieldState,
    grid: &Grid1D,
    ctrl: &StepControl,
    observers: &mut [&mut dyn Observer],
) -> Result<RunSummary, SolverError> {
    check_state(model, grid, &initial)?;
    if initial.species.iter().flatten().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(SolverError::Initial("initial values must be finite and non-negative".into()));
    }
    ctrl.validate(grid, model.max_diffusion())?;

    let t0 = initial.t;
    let margin_ok = domain_margin_ok(model, grid, &initial, ctrl.t_end);
    let total = ctrl.total_steps();
    let every = ctrl.steps_per_snapshot();
    let mut state = initial;
    let mut stepper = Stepper::new(model, grid);
    let mut clamp_count = 0u64;
    let mut contaminated = false;
    let mut diagnostics = Vec::new();

    let mut emit = |state: &FieldState,
                    step: u64,
                    clamp_count: u64,
                    contaminated: &mut bool,
                    observers: &mut [&mut dyn Observer]| {
        if near_boundary(model, grid, state) {
            if !*contaminated {
                log::warn!("front within {BOUNDARY_CELLS} cells of the boundary at t={}", state.t);
            }
            *contaminated = true;
        }
        for obs in observers.iter_mut() {
            obs.observe(grid, state);
        }
        diagnostics.push(DiagnosticRecord {
            t: state.t,
            step,
            clamp_count,
            boundary_contaminated: *contaminated,
        });
    };

    emit(&state, 0, 0, &mut contaminated, observers);
    for step in 1..=total {
        let t = t0 + step as f64 * ctrl.dt;
        clamp_count += stepper.advance(model, &mut state.species, ctrl.dt, step, t)?;
        state.t = t;
        if step % every == 0 || step == total {
            emit(&state, step, clamp_count, &mut contaminated, observers);
        }
    }
    if !margin_ok {
        log::warn!("domain too short for the envelope speed over t_end={}", ctrl.t_end);
    }

    Ok(RunSummary {
        final_state: state,
        steps: total,
        clamp_count,
        boundary_contaminated: contaminated,
        domain_margin_ok: margin_ok,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CoopParams, FisherParams};

    struct PureDiffusion(f64);

    impl Kinetics for PureDiffusion {
        fn species(&self) -> usize {
            1
        }
        fn diffusion(&self, _k: usize) -> f64 {
            self.0
        }
        fn react(&self, _u: &[f64], out: &mut [f64]) {
            out[0] = 0.0;
        }
    }

    fn fisher() -> Model {
        Model::Fisher(FisherParams::new(1.0, 1.0, 1.0).unwrap())
    }

    fn coop() -> CoopParams {
        CoopParams::new(1.0, 1.0, 1.0, 0.8, 0.2, 0.5).unwrap()
    }

    #[test]
    fn grid_examples() {
        assert_eq!(build_grid(-1.0, 1.0, 3).unwrap().dx, 1.0);
        assert!((build_grid(0.0, 10.0, 101).unwrap().dx - 0.1).abs() < 1e-15);
        assert!((build_grid(-400.0, 400.0, 4001).unwrap().dx - 0.2).abs() < 1e-15);
        assert!(build_grid(1.0, 1.0, 10).is_err());
        assert!(build_grid(0.0, 1.0, 2).is_err());
    }

    #[test]
    fn grid_nodes_are_mirror_symmetric() {
        let g = build_grid(-400.0, 400.0, 4001).unwrap();
        for i in 0..g.n {
            assert_eq!(g.x(i), -g.x(g.n - 1 - i));
        }
        assert_eq!(g.x(2000), 0.0);
    }

    #[test]
    fn bump_examples() {
        let g = build_grid(-20.0, 20.0, 401).unwrap();
        let v = init_compact_bump(&g, 0.5, 5.0, 0.0).unwrap();
        for (x, &u) in g.nodes().zip(&v) {
            assert_eq!(u, if x.abs() <= 5.0 { 0.5 } else { 0.0 });
        }
        let v = init_compact_bump(&g, 0.5, 5.0, 3.0).unwrap();
        assert_eq!(v[200], 0.5);
        let m: f64 = v.iter().sum::<f64>() * g.dx;
        assert!(m >= 2.0 * 5.0 * 0.5 && m <= 2.0 * 8.0 * 0.5 + g.dx);
        assert!(v.windows(2).take(200).all(|w| w[0] <= w[1]));
        assert!(init_compact_bump(&g, 0.5, 18.0, 3.0).is_err());
    }

    #[test]
    fn laplacian_examples() {
        let g = build_grid(0.0, 1.0, 11).unwrap();
        let lap = laplacian_apply(&g, &[3.0; 11]).unwrap();
        assert!(lap.iter().all(|&v| v == 0.0));
        let lin: Vec<f64> = g.nodes().map(|x| 2.0 * x + 1.0).collect();
        let lap = laplacian_apply(&g, &lin).unwrap();
        assert!(lap[1..10].iter().all(|v| v.abs() < 1e-10));
        let quad: Vec<f64> = g.nodes().map(|x| x * x).collect();
        let lap = laplacian_apply(&g, &quad).unwrap();
        assert!(lap[1..10].iter().all(|v| (v - 2.0).abs() < 1e-10));
        assert!(matches!(
            laplacian_apply(&g, &[0.0; 5]),
            Err(SolverError::Length { expected: 11, got: 5 })
        ));
    }

    #[test]
    fn cfl_examples() {
        let g = build_grid(-1.0, 1.0, 11).unwrap();
        assert!((cfl_max_dt(&g, 1.0, 0.5) - 0.01).abs() < 1e-15);
        assert!((cfl_max_dt(&g, 1.0, 1.0) - 0.02).abs() < 1e-15);
        let g = build_grid(0.0, 1.0, 11).unwrap();
        assert!((cfl_max_dt(&g, 2.0, 1.0) - 0.0025).abs() < 1e-15);
    }

    #[test]
    fn step_fixed_points() {
        let g = build_grid(-5.0, 5.0, 51).unwrap();
        let m = Model::Coop(coop());
        let zero = FieldState::constant(&g, &[0.0, 0.0]);
        let (next, _) = step_explicit(&m, &g, &zero, 0.005, 0.4).unwrap();
        assert_eq!(next.species, zero.species);
        assert_eq!(next.t, 0.005);
        let (k1, k2) = coop().coexistence();
        let at_k = FieldState::constant(&g, &[k1, k2]);
        let (next, _) = step_explicit(&m, &g, &at_k, 0.005, 0.4).unwrap();
        for (a, b) in next.species.iter().flatten().zip(at_k.species.iter().flatten()) {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn step_rejects_cfl_violation() {
        let g = build_grid(-5.0, 5.0, 51).unwrap();
        let s = FieldState::constant(&g, &[0.1]);
        let limit = cfl_max_dt(&g, 1.0, 0.4);
        assert!(matches!(
            step_explicit(&fisher(), &g, &s, 2.0 * limit, 0.4),
            Err(SolverError::Cfl { .. })
        ));
    }

    #[test]
    fn pure_diffusion_conserves_mass() {
        let g = build_grid(-10.0, 10.0, 101).unwrap();
        let v = init_compact_bump(&g, 1.0, 2.0, 1.0).unwrap();
        let mut s = FieldState::new(0.0, vec![v]);
        let m0 = mass(&g, &s.species[0]);
        let dt = cfl_max_dt(&g, 1.0, 0.9);
        for _ in 0..2000 {
            let before = mass(&g, &s.species[0]);
            s = step_explicit(&PureDiffusion(1.0), &g, &s, dt, 0.9).unwrap().0;
            assert!((mass(&g, &s.species[0]) - before).abs() < 1e-12);
        }
        assert!((mass(&g, &s.species[0]) - m0).abs() < 1e-10);
    }

    #[test]
    fn non_finite_state_aborts() {
        let g = build_grid(-5.0, 5.0, 11).unwrap();
        let mut s = FieldState::constant(&g, &[0.5]);
        s.species[0][3] = f64::INFINITY;
        let err = step_explicit(&fisher(), &g, &s, 0.01, 0.4).unwrap_err();
        assert!(matches!(err, SolverError::NonFinite { .. }));
    }

    #[test]
    fn zero_horizon_returns_initial_state() {
        let g = build_grid(-20.0, 20.0, 201).unwrap();
        let ic = InitialCondition::CompactBump { amp: vec![0.5], width: 5.0, smoothing: 1.0 };
        let ctrl = StepControl::auto(&g, 1.0, 0.0, 1.0, 0.4).unwrap();
        let mut rec = SnapshotRecorder::default();
        let out = integrate(&fisher(), &ic, &g, &ctrl, &mut [&mut rec]).unwrap();
        assert_eq!(out.steps, 0);
        assert_eq!(out.final_state.species, ic.sample(&g).unwrap());
        assert_eq!(rec.snapshots.len(), 1);
    }

    #[test]
    fn auto_step_divides_snapshot_interval() {
        let g = build_grid(-400.0, 400.0, 4001).unwrap();
        let ctrl = StepControl::auto(&g, 1.0, 150.0, 1.0, 0.4).unwrap();
        assert!(ctrl.dt <= cfl_max_dt(&g, 1.0, 0.4) * (1.0 + 1e-12));
        assert_eq!(ctrl.steps_per_snapshot(), 125);
        assert_eq!(ctrl.total_steps(), 18750);
    }

    #[test]
    fn fisher_stays_below_carrying_capacity() {
        let g = build_grid(-60.0, 60.0, 601).unwrap();
        let ic = InitialCondition::CompactBump { amp: vec![0.5], width: 5.0, smoothing: 0.0 };
        let ctrl = StepControl::auto(&g, 1.0, 20.0, 1.0, 0.4).unwrap();
        let mut rec = SnapshotRecorder::default();
        let out = integrate(&fisher(), &ic, &g, &ctrl, &mut [&mut rec]).unwrap();
        assert_eq!(out.clamp_count, 0);
        assert_eq!(rec.snapshots.len(), 21);
        for s in &rec.snapshots {
            assert!(s.species[0].iter().all(|&v| (0.0..=1.0 + 1e-8).contains(&v)));
        }
        assert!(out.domain_margin_ok);
        assert!(!out.boundary_contaminated);
    }

    #[test]
    fn short_domain_is_flagged() {
        let g = build_grid(-30.0, 30.0, 301).unwrap();
        let ic = InitialCondition::CompactBump { amp: vec![0.5], width: 5.0, smoothing: 0.0 };
        let ctrl = StepControl::auto(&g, 1.0, 20.0, 1.0, 0.4).unwrap();
        let out = integrate(&fisher(), &ic, &g, &ctrl, &mut []).unwrap();
        assert!(!out.domain_margin_ok);
        assert!(out.boundary_contaminated);
        assert!(out.flagged());
    }

    #[test]
    fn species_mismatch_rejected() {
        let g = build_grid(-5.0, 5.0, 11).unwrap();
        let ic = InitialCondition::Constant { amp: vec![0.5] };
        let ctrl = StepControl::auto(&g, 1.0, 1.0, 1.0, 0.4).unwrap();
        let err = integrate(&Model::Coop(coop()), &ic, &g, &ctrl, &mut []).unwrap_err();
        assert!(matches!(err, SolverError::SpeciesCount { expected: 2, got: 1 }));
    }
}
