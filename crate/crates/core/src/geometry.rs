//! Boundary curves and their quadrature grids.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::path::Path;

pub type Point = [f64; 2];

/// A 2π-periodic curve given by its Fourier coefficients:
/// `x(t) = Σ_m ax[m] cos mt + bx[m] sin mt`, likewise `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCurve {
    pub ax: Vec<f64>,
    pub bx: Vec<f64>,
    pub ay: Vec<f64>,
    pub by: Vec<f64>,
}

impl FourierCurve {
    /// Parses one mode per line, four columns `a_x b_x a_y b_y`, starting at
    /// mode 0. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = FourierCurve { ax: vec![], bx: vec![], ay: vec![], by: vec![] };
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(|ch: char| ch.is_whitespace() || ch == ',').filter(|s| !s.is_empty()).collect();
            if cols.len() != 4 {
                return Err(Error::InvalidParameter(format!(
                    "line {}: expected 4 columns (a_x b_x a_y b_y), found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let mut vals = [0.0; 4];
            for (v, s) in vals.iter_mut().zip(&cols) {
                *v = s.parse().map_err(|_| Error::InvalidParameter(format!("line {}: cannot parse '{s}' as a number", lineno + 1)))?;
            }
            c.ax.push(vals[0]);
            c.bx.push(vals[1]);
            c.ay.push(vals[2]);
            c.by.push(vals[3]);
        }
        if c.ax.len() < 2 {
            return Err(Error::InvalidParameter("a Fourier curve needs at least modes 0 and 1".into()));
        }
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// `order`-th derivative of the parametrization at `t`.
    fn eval(&self, t: f64, order: u32) -> Point {
        let mut p = [0.0; 2];
        for m in 0..self.ax.len() {
            let mf = m as f64;
            let (s, c) = (mf * t).sin_cos();
            // d^order/dt^order of (a cos mt + b sin mt)
            let (cc, ss) = match order % 4 {
                0 => (c, s),
                1 => (-s, c),
                2 => (-c, -s),
                _ => (s, -c),
            };
            let scale = mf.powi(order as i32);
            if m == 0 && order > 0 {
                continue;
            }
            p[0] += scale * (self.ax[m] * cc + self.bx[m] * ss);
            p[1] += scale * (self.ay[m] * cc + self.by[m] * ss);
        }
        p
    }

    fn chord(&self, t: f64, tau: f64) -> Point {
        let mut p = [0.0; 2];
        for m in 1..self.ax.len() {
            let (cm, sm) = trig_differences(m as f64, t, tau);
            p[0] += self.ax[m] * cm + self.bx[m] * sm;
            p[1] += self.ay[m] * cm + self.by[m] * sm;
        }
        p
    }
}

/// `(cos mτ − cos mt, sin mτ − sin mt)` via sum-to-product, free of cancellation.
fn trig_differences(m: f64, t: f64, tau: f64) -> (f64, f64) {
    let half = 0.5 * m * (tau - t);
    let mid = 0.5 * m * (tau + t);
    let sh = half.sin();
    let (sm, cm) = mid.sin_cos();
    (-2.0 * sm * sh, 2.0 * cm * sh)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClosedCurve {
    Circle {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// `x(t) = (cos t + 0.65 cos 2t − 0.65, 1.5 sin t)`.
    Kite,
    TabulatedSmooth(FourierCurve),
}

impl ClosedCurve {
    pub fn point(&self, t: f64) -> Point {
        self.eval(t, 0)
    }

    pub fn derivative(&self, t: f64) -> Point {
        self.eval(t, 1)
    }

    pub fn second_derivative(&self, t: f64) -> Point {
        self.eval(t, 2)
    }

    /// `x(τ) − x(t)`, accurate to relative roundoff even when `τ ≈ t`.
    pub fn chord(&self, t: f64, tau: f64) -> Point {
        let (dc, ds) = trig_differences(1.0, t, tau);
        match self {
            ClosedCurve::Circle { radius: r } => [r * dc, r * ds],
            ClosedCurve::Ellipse { a, b } => [a * dc, b * ds],
            ClosedCurve::Kite => {
                let (dc2, _) = trig_differences(2.0, t, tau);
                [dc + 0.65 * dc2, 1.5 * ds]
            }
            ClosedCurve::TabulatedSmooth(f) => f.chord(t, tau),
        }
    }

    fn eval(&self, t: f64, order: u32) -> Point {
        let (s, c) = t.sin_cos();
        let (s2, c2) = (2.0 * t).sin_cos();
        match self {
            ClosedCurve::Circle { radius: r } => match order {
                0 => [r * c, r * s],
                1 => [-r * s, r * c],
                _ => [-r * c, -r * s],
            },
            ClosedCurve::Ellipse { a, b } => match order {
                0 => [a * c, b * s],
                1 => [-a * s, b * c],
                _ => [-a * c, -b * s],
            },
            ClosedCurve::Kite => match order {
                0 => [c + 0.65 * c2 - 0.65, 1.5 * s],
                1 => [-s - 1.3 * s2, 1.5 * c],
                _ => [-c - 2.6 * c2, -1.5 * s],
            },
            ClosedCurve::TabulatedSmooth(f) => f.eval(t, order),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ClosedCurve::Circle { radius } if !(radius.is_finite() && *radius > 0.0) => {
                return Err(Error::InvalidParameter(format!("circle radius must be positive, got {radius}")));
            }
            ClosedCurve::Ellipse { a, b } if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) => {
                return Err(Error::InvalidParameter(format!("ellipse semi-axes must be positive, got a={a}, b={b}")));
            }
            _ => {}
        }
        const SAMPLES: usize = 4096;
        let mut min_speed = f64::INFINITY;
        let mut scale: f64 = 0.0;
        let mut area = 0.0;
        for j in 0..SAMPLES {
            let t = 2.0 * PI * j as f64 / SAMPLES as f64;
            let p = self.point(t);
            let d = self.derivative(t);
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(Error::InvalidGrid("parametrization is not finite".into()));
            }
            min_speed = min_speed.min(d[0].hypot(d[1]));
            scale = scale.max(d[0].hypot(d[1]));
            area += 0.5 * (p[0] * d[1] - p[1] * d[0]) * 2.0 * PI / SAMPLES as f64;
        }
        // written so that NaN speeds are rejected too
        let regular = min_speed > 1e-10 * scale.max(1e-300);
        if !regular {
            return Err(Error::InvalidGrid(format!("degenerate parametrization: min |x'(t)| = {min_speed:.3e}")));
        }
        if area <= 0.0 {
            return Err(Error::InvalidGrid("curve must be oriented counter-clockwise (exterior normal on the right of travel)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcSpec {
    pub parent: ClosedCurve,
    pub t0: f64,
    pub t1: f64,
}

impl ArcSpec {
    pub fn validate(&self) -> Result<()> {
        let len = self.t1 - self.t0;
        if !(self.t0.is_finite() && self.t1.is_finite()) || len <= 0.0 || len >= 2.0 * PI {
            return Err(Error::InvalidParameter(format!("arc needs t0 < t1 < t0 + 2π, got t0={}, t1={}", self.t0, self.t1)));
        }
        self.parent.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridKind {
    /// Uniform nodes `t_j = 2πj/N`.
    Closed,
    /// Cosine-clustered nodes `t = t0 + c(1 − cos s)`, `c = (t1 − t0)/2`,
    /// at midpoints `s_j = (2j+1)π/(2N)`.
    Arc { t0: f64, t1: f64 },
}

/// Quadrature grid on a closed curve or an open arc.
///
/// Smooth integrands: `∫ f dσ ≈ Σ_j f(x_j) w_j |x'(t_j)|`, where `w_j` is the
/// weight in the curve parameter `t` (trapezoid on closed curves, Fejér's
/// first rule on arcs).
///
/// Layer densities on arcs carry `d^{-1/2}` / `d^{1/2}` edge behaviour and
/// are integrated instead with [`BoundaryGrid::density_weights`]: the
/// midpoint rule in `s`, which is spectral for `(density)·sin s` smooth.
/// On closed grids both weight sets coincide.
#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    pub curve: ClosedCurve,
    pub kind: GridKind,
    /// Curve parameter `t_j`.
    pub params: Vec<f64>,
    /// Quadrature variable: `t_j` for closed grids, `s_j` for arcs.
    pub nodes: Vec<f64>,
    pub points: Vec<Point>,
    pub normals: Vec<Point>,
    /// Unit tangents in the direction of increasing `t`.
    pub tangents: Vec<Point>,
    /// `|x'(t_j)|`.
    pub jacobians: Vec<f64>,
    pub weights: Vec<f64>,
    pub curvature: Vec<f64>,
}

impl BoundaryGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_arc(&self) -> bool {
        matches!(self.kind, GridKind::Arc { .. })
    }

    /// Arclength weights `w_j |x'(t_j)|` for smooth integrands.
    pub fn sigma_weights(&self) -> Vec<f64> {
        self.weights.iter().zip(&self.jacobians).map(|(w, j)| w * j).collect()
    }

    /// Arclength weights used by the Nyström operators and by every
    /// density pairing: `node_step · node_speed`.
    pub fn density_weights(&self) -> Vec<f64> {
        let h = self.node_step();
        self.node_speed().iter().map(|v| v * h).collect()
    }

    /// Uniform step in the quadrature variable.
    pub fn node_step(&self) -> f64 {
        match self.kind {
            GridKind::Closed => 2.0 * PI / self.len() as f64,
            GridKind::Arc { .. } => PI / self.len() as f64,
        }
    }

    /// `dσ/d(node variable)` at each node: `|x'|` for closed grids,
    /// `|x'| c sin s` for arcs.
    pub fn node_speed(&self) -> Vec<f64> {
        match self.kind {
            GridKind::Closed => self.jacobians.clone(),
            GridKind::Arc { t0, t1 } => {
                let c = 0.5 * (t1 - t0);
                self.nodes.iter().zip(&self.jacobians).map(|(s, j)| j * c * s.sin()).collect()
            }
        }
    }

    /// Largest distance between consecutive nodes.
    pub fn max_spacing(&self) -> f64 {
        let n = self.len();
        let mut gap: f64 = 0.0;
        let pairs = if self.is_arc() { n - 1 } else { n };
        for j in 0..pairs {
            let a = self.points[j];
            let b = self.points[(j + 1) % n];
            gap = gap.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
        gap
    }

    /// `x_j + h ν_j`.
    pub fn offset_point(&self, j: usize, h: f64) -> Point {
        let [x, y] = self.points[j];
        let [nx, ny] = self.normals[j];
        [x + h * nx, y + h * ny]
    }

    /// Distance from `p` to the nearest grid node.
    pub fn distance_to_nodes(&self, p: Point) -> f64 {
        self.points.iter().map(|q| (p[0] - q[0]).hypot(p[1] - q[1])).fold(f64::INFINITY, f64::min)
    }

    /// Distance from `p` to the underlying curve (or arc), found by dense
    /// sampling followed by Newton refinement on the parameter.
    pub fn distance_to_curve(&self, p: Point) -> f64 {
        let (lo, hi) = match self.kind {
            GridKind::Closed => (0.0, 2.0 * PI),
            GridKind::Arc { t0, t1 } => (t0, t1),
        };
        let samples = 512;
        let dist2 = |t: f64| {
            let q = self.curve.point(t);
            (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
        };
        let mut best_t = lo;
        let mut best = f64::INFINITY;
        for j in 0..=samples {
            let t = lo + (hi - lo) * j as f64 / samples as f64;
            let d = dist2(t);
            if d < best {
                best = d;
                best_t = t;
            }
        }
        let mut t = best_t;
        for _ in 0..20 {
            let q = self.curve.point(t);
            let d1 = self.curve.derivative(t);
            let d2 = self.curve.second_derivative(t);
            let r = [q[0] - p[0], q[1] - p[1]];
            let g = r[0] * d1[0] + r[1] * d1[1];
            let h = d1[0] * d1[0] + d1[1] * d1[1] + r[0] * d2[0] + r[1] * d2[1];
            if h <= 0.0 {
                break;
            }
            let next = (t - g / h).clamp(lo, hi);
            if (next - t).abs() < 1e-15 {
                t = next;
                break;
            }
            t = next;
        }
        best.min(dist2(t)).sqrt()
    }
}

fn fill(curve: &ClosedCurve, kind: GridKind, params: Vec<f64>, nodes: Vec<f64>, weights: Vec<f64>) -> BoundaryGrid {
    let n = params.len();
    let mut g = BoundaryGrid {
        curve: curve.clone(),
        kind,
        params,
        nodes,
        points: Vec::with_capacity(n),
        normals: Vec::with_capacity(n),
        tangents: Vec::with_capacity(n),
        jacobians: Vec::with_capacity(n),
        weights,
        curvature: Vec::with_capacity(n),
    };
    for j in 0..n {
        let t = g.params[j];
        let p = curve.point(t);
        let d = curve.derivative(t);
        let dd = curve.second_derivative(t);
        let speed = d[0].hypot(d[1]);
        g.points.push(p);
        g.tangents.push([d[0] / speed, d[1] / speed]);
        g.normals.push([d[1] / speed, -d[0] / speed]);
        g.jacobians.push(speed);
        g.curvature.push((d[0] * dd[1] - d[1] * dd[0]) / speed.powi(3));
    }
    g
}

/// Uniform grid of `n` nodes (even, at least 8) on a closed curve.
pub fn build_grid(curve: &ClosedCurve, n: usize) -> Result<BoundaryGrid> {
    if n < 8 || n % 2 != 0 {
        return Err(Error::InvalidGrid(format!("closed grids need an even node count >= 8, got {n}")));
    }
    curve.validate()?;
    let h = 2.0 * PI / n as f64;
    let params: Vec<f64> = (0..n).map(|j| h * j as f64).collect();
    Ok(fill(curve, GridKind::Closed, params.clone(), params, vec![h; n]))
}

/// Cosine-clustered grid of `n >= 8` nodes on an open arc.
pub fn build_arc_grid(arc: &ArcSpec, n: usize) -> Result<BoundaryGrid> {
    if n < 8 {
        return Err(Error::InvalidGrid(format!("arc grids need at least 8 nodes, got {n}")));
    }
    arc.validate()?;
    let c = 0.5 * (arc.t1 - arc.t0);
    let h = PI / n as f64;
    let nodes: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * h).collect();
    let params = nodes.iter().map(|s| arc.t0 + c * (1.0 - s.cos())).collect();
    let weights = nodes.iter().map(|&s| c * fejer_weight(n, s)).collect();
    Ok(fill(&arc.parent, GridKind::Arc { t0: arc.t0, t1: arc.t1 }, params, nodes, weights))
}

/// Fejér's first-rule weight on `[-1, 1]` at the Chebyshev node `cos s`.
fn fejer_weight(n: usize, s: f64) -> f64 {
    let tail: f64 = (1..=n / 2)
        .map(|m| {
            let mf = m as f64;
            (2.0 * mf * s).cos() / (4.0 * mf * mf - 1.0)
        })
        .sum();
    2.0 / n as f64 * (1.0 - 2.0 * tail)
}
