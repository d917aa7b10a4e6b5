//! Executes one configuration and lays out its artifacts on disk.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use super::CliError;
use crate::fronts::{
    measure_all, parse_species_label, species_label, spreading_verdict, ConeMonitor, ConeRecord,
    Direction, FrontRecorder, FrontTrace, MeasuredFront, SpreadingReport,
};
use crate::solver::{integrate, FieldState, Grid1D, RunSummary, SnapshotRecorder, StepControl};
use crate::theory::{speed_bounds, SpeedBounds};
use crate::verify::{bounds_invariant_check, PropertyResult};

pub const ARTIFACTS: [&str; 5] =
    ["config.echo", "snapshots.csv", "fronts.csv", "speeds.jsonl", "diagnostics.log"];

/// Everything a run produced, held in memory.
#[derive(Debug, Clone)]
pub struct Execution {
    pub config: RunConfig,
    pub grid: Grid1D,
    pub ctrl: StepControl,
    pub summary: RunSummary,
    pub snapshots: Vec<FieldState>,
    pub traces: Vec<FrontTrace>,
    pub cones: Vec<ConeRecord>,
    pub measured: Vec<MeasuredFront>,
    pub bounds: SpeedBounds,
    pub report: SpreadingReport,
    pub upper_box: Vec<f64>,
    pub box_check: PropertyResult,
}

impl Execution {
    pub fn front(&self, species: usize, direction: Direction) -> Option<&MeasuredFront> {
        self.measured
            .iter()
            .find(|m| m.species == species && m.direction == direction)
    }

    /// Outward speed of the right-moving front of `species`.
    pub fn speed(&self, species: usize) -> Option<f64> {
        self.front(species, Direction::Right).map(MeasuredFront::outward_speed)
    }

    pub fn trace(&self, species: usize, direction: Direction) -> Option<&FrontTrace> {
        self.traces
            .iter()
            .find(|t| t.species == species && t.direction == direction)
    }

    /// Verdicts hold, the box is respected, nothing was clamped and the
    /// boundary stayed clean.
    pub fn passed(&self) -> bool {
        self.report.passed()
            && self.box_check.passed
            && self.summary.clamp_count == 0
            && !self.summary.flagged()
    }
}

pub fn execute(config: &RunConfig) -> Result<Execution, CliError> {
    config.validate()?;
    let grid = config.grid()?;
    let ctrl = config.step_control(&grid)?;
    let mut snaps = SnapshotRecorder::default();
    let mut fronts = FrontRecorder::both_sides(&config.levels());
    let mut cones = ConeMonitor::new(&config.observe.cones);
    let summary = integrate(
        &config.model,
        &config.init,
        &grid,
        &ctrl,
        &mut [&mut snaps, &mut fronts, &mut cones],
    )?;
    let measured = measure_all(&fronts.traces, &config.observe.fit);
    let bounds = speed_bounds(&config.model);
    let report = spreading_verdict(&measured, &bounds, &config.observe.tolerance);
    let sups = snaps.snapshots[0].sup();
    let upper_box = config
        .model
        .upper_box(&sups)
        .map_err(|e| CliError::invariant("init", e.to_string()))?;
    let box_check = bounds_invariant_check("bounds.box", &grid, &snaps.snapshots, &upper_box);
    Ok(Execution {
        config: config.clone(),
        grid,
        ctrl,
        summary,
        snapshots: snaps.snapshots,
        traces: fronts.traces,
        cones: cones.records,
        measured,
        bounds,
        report,
        upper_box,
        box_check,
    })
}

#[derive(Debug)]
pub struct RunOutcome {
    pub execution: Execution,
    pub dir: PathBuf,
}

/// Shortest round-trip decimal, switching to exponent form for very small
/// or very large magnitudes.
pub(crate) fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(path, e))
}

pub(crate) fn write_snapshots(path: &Path, ex: &Execution) -> Result<(), CliError> {
    let mut w = create(path)?;
    let io = |e| CliError::io(path, e);
    let m = ex.config.model.species();
    let header: Vec<String> = (0..m).map(species_label).collect();
    writeln!(w, "t,x,{}", header.join(",")).map_err(io)?;
    let stride = ex.config.output.snapshot_stride;
    for s in &ex.snapshots {
        let t = fmt_num(s.t);
        for i in (0..ex.grid.n).step_by(stride) {
            write!(w, "{t},{}", fmt_num(ex.grid.x(i))).map_err(io)?;
            for k in 0..m {
                write!(w, ",{}", fmt_num(s.species[k][i])).map_err(io)?;
            }
            writeln!(w).map_err(io)?;
        }
    }
    finish(w, path)
}

fn write_fronts(path: &Path, traces: &[FrontTrace]) -> Result<(), CliError> {
    let mut w = create(path)?;
    let io = |e| CliError::io(path, e);
    writeln!(w, "species,direction,lambda,t,x").map_err(io)?;
    for tr in traces {
        for &(t, x) in &tr.samples {
            writeln!(
                w,
                "{},{},{},{},{}",
                species_label(tr.species),
                tr.direction.as_str(),
                fmt_num(tr.level),
                fmt_num(t),
                fmt_num(x)
            )
            .map_err(io)?;
        }
    }
    finish(w, path)
}

#[derive(Serialize)]
struct FinalRecord<'a> {
    r#final: bool,
    steps: u64,
    dt: f64,
    clamp_count: u64,
    boundary_contaminated: bool,
    domain_margin_ok: bool,
    upper_box: &'a [f64],
    box_check: &'a PropertyResult,
}

fn write_diagnostics(path: &Path, ex: &Execution) -> Result<(), CliError> {
    let mut w = create(path)?;
    let io = |e| CliError::io(path, e);
    for d in &ex.summary.diagnostics {
        writeln!(w, "{}", serde_json::to_string(d).expect("diagnostic serializes")).map_err(io)?;
    }
    let last = FinalRecord {
        r#final: true,
        steps: ex.summary.steps,
        dt: ex.ctrl.dt,
        clamp_count: ex.summary.clamp_count,
        boundary_contaminated: ex.summary.boundary_contaminated,
        domain_margin_ok: ex.summary.domain_margin_ok,
        upper_box: &ex.upper_box,
        box_check: &ex.box_check,
    };
    writeln!(w, "{}", serde_json::to_string(&last).expect("summary serializes")).map_err(io)?;
    finish(w, path)
}

/// Runs `config` and writes the five artifacts into `dir`, replacing any
/// earlier output there.
pub fn run(config: &RunConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    if ARTIFACTS.iter().any(|a| dir.join(a).exists()) {
        log::warn!("overwriting previous run output in {}", dir.display());
    }
    // Fail on an unwritable directory before spending time integrating.
    let echo_path = dir.join("config.echo");
    std::fs::write(&echo_path, config.echo()).map_err(|e| CliError::io(&echo_path, e))?;

    let ex = execute(config)?;
    write_snapshots(&dir.join("snapshots.csv"), &ex)?;
    write_fronts(&dir.join("fronts.csv"), &ex.traces)?;
    let speeds = dir.join("speeds.jsonl");
    std::fs::write(&speeds, ex.report.to_jsonl()).map_err(|e| CliError::io(&speeds, e))?;
    write_diagnostics(&dir.join("diagnostics.log"), &ex)?;
    Ok(RunOutcome { execution: ex, dir: dir.to_path_buf() })
}

/// Reads `fronts.csv` back into traces, grouped by (species, direction,
/// level) in first-seen order.
pub fn read_fronts_csv(path: &Path) -> Result<Vec<FrontTrace>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::MissingFile(path.to_path_buf())
        } else {
            CliError::io(path, e)
        }
    })?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header.trim() != "species,direction,lambda,t,x" {
        return Err(CliError::schema("fronts", format!("unexpected header `{header}`")));
    }
    let mut order: Vec<(usize, Direction, u64)> = Vec::new();
    let mut traces: BTreeMap<(usize, Direction, u64), FrontTrace> = BTreeMap::new();
    for (no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || CliError::schema("fronts", format!("line {}: malformed row `{line}`", no + 2));
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 5 {
            return Err(bad());
        }
        let species = parse_species_label(f[0]).ok_or_else(bad)?;
        let direction: Direction = f[1].parse().map_err(|_| bad())?;
        let level: f64 = f[2].parse().map_err(|_| bad())?;
        let t: f64 = f[3].parse().map_err(|_| bad())?;
        let x: f64 = f[4].parse().map_err(|_| bad())?;
        let key = (species, direction, level.to_bits());
        let tr = traces.entry(key).or_insert_with(|| {
            order.push(key);
            FrontTrace::new(species, direction, level)
        });
        tr.push(t, x);
    }
    Ok(order.into_iter().filter_map(|k| traces.remove(&k)).collect())
}
