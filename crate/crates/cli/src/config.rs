//! JSON run configuration.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use weyl_scatter::geometry::FourierCurve;
use weyl_scatter::layerops::in_exclusion_band;
use weyl_scatter::{BoundaryCondition, Branch, ClosedCurve, Condition, Coupling, Point};

/// A configuration problem, reported with the offending field.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("{field}: {msg}"))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub bc: BcConfig,
    pub k: KSpec,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M", default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub branch: BranchName,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub field: Option<FieldConfig>,
    #[serde(default)]
    pub resolvent: Option<ResolventConfig>,
}

fn default_m() -> usize {
    64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryConfig {
    #[serde(flatten)]
    pub shape: Shape,
    #[serde(default)]
    pub arc: Option<ArcConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    Circle {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    Kite,
    /// Fourier coefficients in a text file, relative to the config file.
    Tabulated {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcConfig {
    pub t0: f64,
    pub t1: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CouplingValue {
    Constant(f64),
    Samples(Vec<f64>),
}

impl From<&CouplingValue> for Coupling {
    fn from(c: &CouplingValue) -> Self {
        match c {
            CouplingValue::Constant(v) => Coupling::Constant(*v),
            CouplingValue::Samples(v) => Coupling::Samples(v.clone()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BcConfig {
    Dirichlet,
    Neumann,
    Robin { b_minus: CouplingValue, b_plus: CouplingValue },
    Delta { alpha: CouplingValue },
    DeltaPrime { beta: CouplingValue },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSpec {
    Single(f64),
    Sweep { k_min: f64, k_max: f64, count: usize },
}

impl KSpec {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            KSpec::Single(k) => vec![k],
            KSpec::Sweep { k_min, k_max, count } => {
                if count == 1 {
                    return vec![k_min];
                }
                (0..count).map(|i| k_min + (k_max - k_min) * i as f64 / (count - 1) as f64).collect()
            }
        }
    }

    pub fn is_sweep(&self) -> bool {
        matches!(self, KSpec::Sweep { .. })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchName {
    #[default]
    Minus,
    Plus,
}

impl From<BranchName> for Branch {
    fn from(b: BranchName) -> Self {
        match b {
            BranchName::Minus => Branch::Minus,
            BranchName::Plus => Branch::Plus,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    #[serde(default = "default_incident")]
    pub incident: Point,
    #[serde(default)]
    pub points: Vec<Point>,
    #[serde(default)]
    pub grid: Option<PointGrid>,
}

fn default_incident() -> Point {
    [1.0, 0.0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventConfig {
    pub x: Point,
    pub y0: Point,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
}

fn default_eps() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3]
}

/// A configuration with every referenced object built and validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub curve: ClosedCurve,
    pub bc: BoundaryCondition,
    pub ks: Vec<f64>,
}

impl FieldConfig {
    pub fn all_points(&self) -> Vec<Point> {
        let mut pts = self.points.clone();
        if let Some(g) = &self.grid {
            let step = |lo: f64, hi: f64, n: usize, i: usize| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
            for iy in 0..g.ny {
                for ix in 0..g.nx {
                    pts.push([step(g.x_min, g.x_max, g.nx, ix), step(g.y_min, g.y_max, g.ny, iy)]);
                }
            }
        }
        pts
    }
}

pub fn load(path: &Path) -> Result<Resolved, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let config: RunConfig = serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    resolve(config, path.parent().unwrap_or(Path::new(".")))
}

fn finite(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(field_err(field, format!("must be finite, got {v}")))
    }
}

pub fn resolve(config: RunConfig, base: &Path) -> Result<Resolved, ConfigError> {
    let curve = match &config.geometry.shape {
        Shape::Circle { radius } => ClosedCurve::Circle { radius: *radius },
        Shape::Ellipse { a, b } => ClosedCurve::Ellipse { a: *a, b: *b },
        Shape::Kite => ClosedCurve::Kite,
        Shape::Tabulated { path } => {
            let full = if path.is_absolute() { path.clone() } else { base.join(path) };
            ClosedCurve::TabulatedSmooth(FourierCurve::from_file(&full).map_err(|e| field_err("geometry.path", e))?)
        }
    };
    curve.validate().map_err(|e| field_err("geometry", e))?;

    let condition = match &config.bc {
        BcConfig::Dirichlet => Condition::Dirichlet,
        BcConfig::Neumann => Condition::Neumann,
        BcConfig::Robin { b_minus, b_plus } => Condition::Robin { b_minus: b_minus.into(), b_plus: b_plus.into() },
        BcConfig::Delta { alpha } => Condition::Delta { alpha: alpha.into() },
        BcConfig::DeltaPrime { beta } => Condition::DeltaPrime { beta: beta.into() },
    };
    let mut bc = BoundaryCondition::new(condition);
    if let Some(arc) = config.geometry.arc {
        finite("geometry.arc.t0", arc.t0)?;
        finite("geometry.arc.t1", arc.t1)?;
        bc = bc.on_arc(arc.t0, arc.t1);
    }
    bc.validate().map_err(|e| field_err("bc", e))?;

    match config.k {
        KSpec::Single(k) => {
            if !(k.is_finite() && k > 0.0) {
                return Err(field_err("k", format!("wavenumber must be positive and finite, got {k}")));
            }
        }
        KSpec::Sweep { k_min, k_max, count } => {
            if !(k_min.is_finite() && k_min > 0.0) {
                return Err(field_err("k.k_min", format!("must be positive and finite, got {k_min}")));
            }
            if !(k_max.is_finite() && k_max >= k_min) {
                return Err(field_err("k.k_max", format!("must be finite and >= k_min, got {k_max}")));
            }
            if count == 0 {
                return Err(field_err("k.count", "must be at least 1"));
            }
        }
    }
    if config.m < 2 {
        return Err(field_err("M", format!("need at least 2 directions, got {}", config.m)));
    }
    if config.threads == Some(0) {
        return Err(field_err("threads", "must be at least 1"));
    }
    // builds the grid once, which checks N against the support
    let grid = bc.grid(&curve, config.n).map_err(|e| field_err("N", e))?;

    if let Some(f) = &config.field {
        let norm = f.incident[0].hypot(f.incident[1]);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(field_err("field.incident", format!("must be a unit vector, |d| = {norm}")));
        }
        if let Some(g) = &f.grid {
            for (name, v) in [("x_min", g.x_min), ("x_max", g.x_max), ("y_min", g.y_min), ("y_max", g.y_max)] {
                finite(&format!("field.grid.{name}"), v)?;
            }
            if g.nx == 0 || g.ny == 0 {
                return Err(field_err("field.grid", "nx and ny must be positive"));
            }
        }
        for (i, p) in f.points.iter().enumerate() {
            finite(&format!("field.points[{i}]"), p[0])?;
            finite(&format!("field.points[{i}]"), p[1])?;
        }
    }
    if let Some(r) = &config.resolvent {
        for (name, p) in [("resolvent.x", r.x), ("resolvent.y0", r.y0)] {
            finite(name, p[0])?;
            finite(name, p[1])?;
            if in_exclusion_band(&grid, p) {
                return Err(field_err(name, "lies within the exclusion band around the curve"));
            }
        }
        if r.x == r.y0 {
            return Err(field_err("resolvent", "x and y0 must differ"));
        }
        for (i, e) in r.eps.iter().enumerate() {
            if !(e.is_finite() && *e > 0.0) {
                return Err(field_err(&format!("resolvent.eps[{i}]"), format!("must be positive, got {e}")));
            }
        }
    }
    let ks = config.k.values();
    Ok(Resolved { config, curve, bc, ks })
}
