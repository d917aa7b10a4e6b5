//! Run configuration: a flat `section.key = value` text format (valid TOML),
//! validated field by field, with a fully-resolved echo.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Value;

use super::CliError;
use crate::fronts::{FitWindow, Tolerance};
use crate::model::{CoopParams, CubicParams, FisherParams, Model, ModelError};
use crate::solver::{build_grid, cfl_max_dt, Grid1D, InitialCondition, StepControl};

/// Dotted key to value.
pub type FlatConfig = BTreeMap<String, Value>;

pub const DEFAULT_DX: f64 = 0.2;
pub const DEFAULT_SAFETY: f64 = 0.4;
pub const DEFAULT_SNAPSHOT_EVERY: f64 = 1.0;
pub const DEFAULT_HALF_WIDTH: f64 = 400.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid1D, CliError> {
        let cells = (self.x_max - self.x_min) / self.dx;
        let rounded = cells.round();
        if !(self.dx > 0.0) || (cells - rounded).abs() > 1e-9 * rounded.max(1.0) {
            return Err(CliError::invariant(
                "grid.dx",
                format!(
                    "dx={} must divide the domain [{}, {}] into whole cells",
                    self.dx, self.x_min, self.x_max
                ),
            ));
        }
        build_grid(self.x_min, self.x_max, rounded as usize + 1)
            .map_err(|e| CliError::invariant("grid.x_min, grid.x_max", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSpec {
    pub t_end: f64,
    /// `None` picks the largest stable step dividing the snapshot interval.
    pub dt: Option<f64>,
    pub safety: f64,
    pub snapshot_every: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObserveSpec {
    /// Front levels per species; `None` means half of the target state.
    pub levels: Option<Vec<f64>>,
    pub cones: Vec<f64>,
    pub fit: FitWindow,
    pub tolerance: Tolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    /// Write every `snapshot_stride`-th node to `snapshots.csv`.
    pub snapshot_stride: usize,
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: Model,
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub init: InitialCondition,
    pub observe: ObserveSpec,
    pub output: OutputSpec,
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid1D, CliError> {
        self.grid.build()
    }

    pub fn step_control(&self, grid: &Grid1D) -> Result<StepControl, CliError> {
        let d_max = self.model.max_diffusion();
        let t = &self.time;
        match t.dt {
            None => StepControl::auto(grid, d_max, t.t_end, t.snapshot_every, t.safety)
                .map_err(|e| CliError::invariant("time", e.to_string())),
            Some(dt) => {
                let ctrl = StepControl {
                    dt,
                    t_end: t.t_end,
                    snapshot_every: t.snapshot_every,
                    safety: t.safety,
                };
                ctrl.validate(grid, d_max).map_err(|e| {
                    let limit = cfl_max_dt(grid, d_max, t.safety);
                    CliError::invariant(
                        "time.dt",
                        format!("{e}; cfl_max_dt = {limit} for dx={} and safety={}", grid.dx, t.safety),
                    )
                })?;
                Ok(ctrl)
            }
        }
    }

    pub fn levels(&self) -> Vec<f64> {
        self.observe
            .levels
            .clone()
            .unwrap_or_else(|| self.model.target().iter().map(|k| 0.5 * k).collect())
    }

    /// Checks every cross-field invariant.
    pub fn validate(&self) -> Result<(), CliError> {
        self.model.validate().map_err(model_error)?;
        let grid = self.grid()?;
        self.step_control(&grid)?;
        let m = self.model.species();
        if self.init.species() != m {
            return Err(CliError::invariant(
                "init.amp",
                format!("{} model needs {m} amplitude(s), got {}", self.model.name(), self.init.species()),
            ));
        }
        self.init
            .sample(&grid)
            .map_err(|e| CliError::invariant("init", e.to_string()))?;
        if let Some(levels) = &self.observe.levels {
            if levels.len() != m || levels.iter().any(|l| !(*l > 0.0)) {
                return Err(CliError::invariant(
                    "observe.levels",
                    format!("need {m} positive level(s), got {levels:?}"),
                ));
            }
        }
        if self.observe.cones.iter().any(|c| !(*c >= 0.0)) {
            return Err(CliError::invariant("observe.cones", "cone slopes must be non-negative"));
        }
        let fit = &self.observe.fit;
        if !(fit.fraction > 0.0 && fit.fraction <= 1.0) {
            return Err(CliError::invariant("observe.fit_fraction", "must lie in (0, 1]"));
        }
        if self.output.snapshot_stride == 0 {
            return Err(CliError::invariant("output.snapshot_stride", "must be at least 1"));
        }
        Ok(())
    }

    /// Builds a configuration from dotted keys, applying defaults.
    pub fn from_flat(flat: &FlatConfig) -> Result<Self, CliError> {
        let mut r = Reader { flat, used: Vec::new() };
        let cfg = read_config(&mut r)?;
        if let Some(key) = flat.keys().find(|k| !r.used.contains(k)) {
            return Err(CliError::schema(key, "unknown key"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// The fully-resolved configuration as dotted keys.
    pub fn to_flat(&self) -> FlatConfig {
        let mut f = FlatConfig::new();
        let mut put = |k: &str, v: Value| {
            f.insert(k.to_string(), v);
        };
        put("model.kind", Value::String(self.model.name().into()));
        match &self.model {
            Model::Coop(p) => {
                for (k, v) in [
                    ("d1", p.d1),
                    ("d2", p.d2),
                    ("r1", p.r1),
                    ("r2", p.r2),
                    ("b1", p.b1),
                    ("b2", p.b2),
                ] {
                    put(&format!("model.{k}"), Value::Float(v));
                }
            }
            Model::Fisher(p) => {
                put("model.d", Value::Float(p.d));
                put("model.r", Value::Float(p.r));
                put("model.k", Value::Float(p.k));
            }
            Model::Cubic(p) => {
                put("model.d", Value::Float(p.d));
                put("model.nu", Value::Float(p.nu));
            }
        }
        put("grid.x_min", Value::Float(self.grid.x_min));
        put("grid.x_max", Value::Float(self.grid.x_max));
        put("grid.dx", Value::Float(self.grid.dx));
        put("time.t_end", Value::Float(self.time.t_end));
        if let Some(dt) = self.time.dt {
            put("time.dt", Value::Float(dt));
        }
        put("time.safety", Value::Float(self.time.safety));
        put("time.snapshot_every", Value::Float(self.time.snapshot_every));
        let floats = |v: &[f64]| Value::Array(v.iter().map(|&x| Value::Float(x)).collect());
        match &self.init {
            InitialCondition::CompactBump { amp, width, smoothing } => {
                put("init.kind", Value::String("compact_bump".into()));
                put("init.amp", floats(amp));
                put("init.width", Value::Float(*width));
                put("init.smoothing", Value::Float(*smoothing));
            }
            InitialCondition::Constant { amp } => {
                put("init.kind", Value::String("constant".into()));
                put("init.amp", floats(amp));
            }
            InitialCondition::Step { amp, position } => {
                put("init.kind", Value::String("step".into()));
                put("init.amp", floats(amp));
                put("init.position", Value::Float(*position));
            }
            InitialCondition::CustomTable { x, values } => {
                put("init.kind", Value::String("custom_table".into()));
                put("init.x", floats(x));
                put("init.values", Value::Array(values.iter().map(|v| floats(v)).collect()));
            }
        }
        if let Some(levels) = &self.observe.levels {
            put("observe.levels", floats(levels));
        }
        put("observe.cones", floats(&self.observe.cones));
        put("observe.fit_fraction", Value::Float(self.observe.fit.fraction));
        put("observe.fit_min_time", Value::Float(self.observe.fit.min_time));
        put("observe.tolerance_below", Value::Float(self.observe.tolerance.below));
        put("observe.tolerance_above", Value::Float(self.observe.tolerance.above));
        put("observe.tolerance_relative", Value::Boolean(self.observe.tolerance.relative));
        put("output.snapshot_stride", Value::Integer(self.output.snapshot_stride as i64));
        if let Some(dir) = &self.output.dir {
            put("output.dir", Value::String(dir.display().to_string()));
        }
        f
    }

    /// `key = value` lines, re-readable by [`parse_config_str`].
    pub fn echo(&self) -> String {
        render_flat(&self.to_flat())
    }
}

pub fn render_flat(flat: &FlatConfig) -> String {
    let mut out = String::new();
    for (k, v) in flat {
        let _ = writeln!(out, "{k} = {}", render_value(v));
    }
    out
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Float(x) => format!("{x:?}"),
        Value::Integer(i) => i.to_string(),
        Value::Boolean(b) => b.to_string(),
        Value::String(s) => serde_json::to_string(s).expect("string serializes"),
        Value::Array(a) => {
            let items: Vec<String> = a.iter().map(render_value).collect();
            format!("[{}]", items.join(", "))
        }
        other => other.to_string(),
    }
}

fn model_error(e: ModelError) -> CliError {
    let fields = match &e {
        ModelError::NonPositive { name, .. } => format!("model.{name}"),
        ModelError::CooperationTooStrong { .. } => "model.b1, model.b2".to_string(),
        ModelError::CubicCoefficient(_) => "model.nu".to_string(),
        ModelError::NegativeDensity(_) => "init".to_string(),
    };
    CliError::invariant(&fields, e.to_string())
}

/// Flattens nested tables into dotted keys.
pub fn flatten(table: &toml::Table) -> FlatConfig {
    fn walk(prefix: &str, table: &toml::Table, out: &mut FlatConfig) {
        for (k, v) in table {
            let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            match v {
                Value::Table(t) => walk(&key, t, out),
                other => {
                    out.insert(key, other.clone());
                }
            }
        }
    }
    let mut out = FlatConfig::new();
    walk("", table, &mut out);
    out
}

pub fn parse_flat_str(text: &str, origin: &str) -> Result<FlatConfig, CliError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Syntax {
        path: origin.to_string(),
        message: e.message().to_string(),
    })?;
    Ok(flatten(&table))
}

pub fn read_flat(path: &Path) -> Result<FlatConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::MissingFile(path.to_path_buf())
        } else {
            CliError::io(path, e)
        }
    })?;
    parse_flat_str(&text, &path.display().to_string())
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, CliError> {
    RunConfig::from_flat(&parse_flat_str(text, "<string>")?)
}

/// Reads and validates a configuration file. A `custom_table` initial
/// condition may reference a CSV file via `init.table`, resolved relative to
/// the configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let mut flat = read_flat(path)?;
    inline_table(&mut flat, path.parent().unwrap_or(Path::new(".")))?;
    RunConfig::from_flat(&flat)
}

/// Replaces `init.table = "file.csv"` by inline `init.x` / `init.values`.
pub fn inline_table(flat: &mut FlatConfig, base: &Path) -> Result<(), CliError> {
    let Some(v) = flat.remove("init.table") else {
        return Ok(());
    };
    let Value::String(rel) = v else {
        return Err(CliError::schema("init.table", "expected a file path string"));
    };
    let path = base.join(rel);
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let mut xs = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for (line_no, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let nums: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let nums = nums.map_err(|_| {
            CliError::schema("init.table", format!("{}:{}: not a number", path.display(), line_no + 1))
        })?;
        if nums.len() < 2 {
            return Err(CliError::schema("init.table", "rows need x and at least one species"));
        }
        if cols.is_empty() {
            cols = vec![Vec::new(); nums.len() - 1];
        }
        if nums.len() - 1 != cols.len() {
            return Err(CliError::schema("init.table", "ragged rows"));
        }
        xs.push(nums[0]);
        for (c, v) in cols.iter_mut().zip(&nums[1..]) {
            c.push(*v);
        }
    }
    let floats = |v: &[f64]| Value::Array(v.iter().map(|&x| Value::Float(x)).collect());
    flat.insert("init.x".into(), floats(&xs));
    flat.insert("init.values".into(), Value::Array(cols.iter().map(|c| floats(c)).collect()));
    Ok(())
}

struct Reader<'a> {
    flat: &'a FlatConfig,
    used: Vec<&'a String>,
}

impl<'a> Reader<'a> {
    fn raw(&mut self, key: &str) -> Option<&'a Value> {
        let (k, v) = self.flat.get_key_value(key)?;
        self.used.push(k);
        Some(v)
    }

    fn f64_opt(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => as_f64(v).map(Some).ok_or_else(|| CliError::schema(key, "expected a number")),
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn f64_req(&mut self, key: &str) -> Result<f64, CliError> {
        self.f64_opt(key)?.ok_or_else(|| CliError::schema(key, "required key is missing"))
    }

    fn list_opt(&mut self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| as_f64(v).ok_or_else(|| CliError::schema(key, "expected numbers")))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(v) => as_f64(v)
                .map(|x| Some(vec![x]))
                .ok_or_else(|| CliError::schema(key, "expected a number or a list of numbers")),
        }
    }

    fn str_opt(&mut self, key: &str) -> Result<Option<&'a str>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(CliError::schema(key, "expected a string")),
        }
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(Value::Boolean(b)) => Ok(*b),
            Some(_) => Err(CliError::schema(key, "expected true or false")),
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn read_config(r: &mut Reader) -> Result<RunConfig, CliError> {
    let kind = r
        .str_opt("model.kind")?
        .ok_or_else(|| CliError::schema("model.kind", "required key is missing"))?;
    // Parameter structs are assembled unchecked here; `validate` maps
    // failures back to field paths.
    let model = match kind {
        "coop" => Model::Coop(CoopParams {
            d1: r.f64_req("model.d1")?,
            d2: r.f64_req("model.d2")?,
            r1: r.f64_req("model.r1")?,
            r2: r.f64_req("model.r2")?,
            b1: r.f64_req("model.b1")?,
            b2: r.f64_req("model.b2")?,
        }),
        "fisher" => Model::Fisher(FisherParams {
            d: r.f64_req("model.d")?,
            r: r.f64_req("model.r")?,
            k: r.f64_or("model.k", 1.0)?,
        }),
        "cubic" => Model::Cubic(CubicParams { d: r.f64_req("model.d")?, nu: r.f64_req("model.nu")? }),
        other => {
            return Err(CliError::schema(
                "model.kind",
                format!("unknown model `{other}` (expected coop, fisher or cubic)"),
            ))
        }
    };
    model.validate().map_err(model_error)?;
    let m = model.species();

    let grid = GridSpec {
        x_min: r.f64_or("grid.x_min", -DEFAULT_HALF_WIDTH)?,
        x_max: r.f64_or("grid.x_max", DEFAULT_HALF_WIDTH)?,
        dx: r.f64_or("grid.dx", DEFAULT_DX)?,
    };
    let time = TimeSpec {
        t_end: r.f64_req("time.t_end")?,
        dt: r.f64_opt("time.dt")?,
        safety: r.f64_or("time.safety", DEFAULT_SAFETY)?,
        snapshot_every: r.f64_or("time.snapshot_every", DEFAULT_SNAPSHOT_EVERY)?,
    };

    let broadcast = |v: Vec<f64>| if v.len() == 1 { vec![v[0]; m] } else { v };
    let init_kind = r.str_opt("init.kind")?.unwrap_or("compact_bump");
    let init = match init_kind {
        "compact_bump" => InitialCondition::CompactBump {
            amp: broadcast(r.list_opt("init.amp")?.unwrap_or_else(|| vec![0.5])),
            width: r.f64_or("init.width", 5.0)?,
            smoothing: r.f64_or("init.smoothing", 0.0)?,
        },
        "constant" => InitialCondition::Constant {
            amp: broadcast(
                r.list_opt("init.amp")?
                    .ok_or_else(|| CliError::schema("init.amp", "required key is missing"))?,
            ),
        },
        "step" => InitialCondition::Step {
            amp: broadcast(
                r.list_opt("init.amp")?
                    .ok_or_else(|| CliError::schema("init.amp", "required key is missing"))?,
            ),
            position: r.f64_or("init.position", 0.0)?,
        },
        "custom_table" => {
            let x = r
                .list_opt("init.x")?
                .ok_or_else(|| CliError::schema("init.x", "required key is missing (or set init.table)"))?;
            let values = match r.raw("init.values") {
                Some(Value::Array(cols)) => cols
                    .iter()
                    .map(|c| match c {
                        Value::Array(col) => col
                            .iter()
                            .map(|v| as_f64(v).ok_or_else(|| CliError::schema("init.values", "expected numbers")))
                            .collect::<Result<Vec<_>, _>>(),
                        _ => Err(CliError::schema("init.values", "expected a list of columns")),
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                _ => return Err(CliError::schema("init.values", "required list of columns is missing")),
            };
            InitialCondition::CustomTable { x, values }
        }
        other => {
            return Err(CliError::schema(
                "init.kind",
                format!("unknown initial condition `{other}`"),
            ))
        }
    };

    let defaults = Tolerance::default();
    let observe = ObserveSpec {
        levels: r.list_opt("observe.levels")?.map(broadcast),
        cones: r.list_opt("observe.cones")?.unwrap_or_default(),
        fit: FitWindow {
            fraction: r.f64_or("observe.fit_fraction", FitWindow::default().fraction)?,
            min_time: r.f64_or("observe.fit_min_time", FitWindow::default().min_time)?,
        },
        tolerance: Tolerance {
            below: r.f64_or("observe.tolerance_below", defaults.below)?,
            above: r.f64_or("observe.tolerance_above", defaults.above)?,
            relative: r.bool_or("observe.tolerance_relative", defaults.relative)?,
        },
    };
    let stride = match r.raw("output.snapshot_stride") {
        None => 1,
        Some(Value::Integer(i)) if *i >= 1 => *i as usize,
        Some(_) => return Err(CliError::schema("output.snapshot_stride", "expected a positive integer")),
    };
    let output = OutputSpec {
        snapshot_stride: stride,
        dir: r.str_opt("output.dir")?.map(PathBuf::from),
    };
    Ok(RunConfig { model, grid, time, init, observe, output })
}
