//! Boundary conditions and the Weyl systems `W = Θ + Π M_z Π′` whose solutions
//! are the jump densities `(φ, ψ) = (−[γ₁]u, [γ₀]u)` of the scattered field
//! `u = u_inc + SLφ + DLψ`.
//!
//! With `γG_z = [[V, K], [K′, T]]` (averaged traces) every catalog condition
//! has the form `W = B_Θ − Π γG_z Π′`:
//!
//! | condition | Π    | W                                                    |
//! |-----------|------|------------------------------------------------------|
//! | Dirichlet | φ    | `−V`                                                 |
//! | Neumann   | ψ    | `−T`                                                 |
//! | δ(α)      | φ    | `−(1/α + V)`, solved as `(1 + αV)φ′ = αg`, `φ = −φ′` |
//! | δ′(β)     | ψ    | `1/β − T`, solved as `(1 − βT)ψ = βh`                |
//! | Robin     | both | `−[[1/[b] + V, ⟨b⟩/[b] + K], [⟨b⟩/[b] + K′, b₊b₋/[b] + T]]` |
//!
//! where `[b] = b₊ − b₋`, `⟨b⟩ = (b₊ + b₋)/2` and the Robin condition reads
//! `γ₁^±u = b_± γ₀^±u` on the two sides.

use crate::error::{Error, Result};
use crate::geometry::{ArcSpec, BoundaryGrid, ClosedCurve, GridKind};
use crate::layerops::{assemble, LayerOperatorSet};
use crate::specfun::SpectralParameter;
use crate::CMatrix;
use nalgebra::{DMatrix, DVector, LU};
use num_complex::Complex64;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Systems whose estimated 1-norm condition number exceeds this are
/// reported as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// A real coupling function on the parent curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    Constant(f64),
    /// Values at `t_m = 2πm/M`, trigonometrically interpolated in `t`.
    Samples(Vec<f64>),
}

impl Coupling {
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Coupling::Constant(c) => Some(*c),
            Coupling::Samples(_) => None,
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            Coupling::Constant(c) => *c,
            Coupling::Samples(v) => trig_interpolate(v, t),
        }
    }

    fn check(&self, name: &str) -> Result<()> {
        match self {
            Coupling::Constant(c) if !c.is_finite() => Err(Error::InvalidParameter(format!("{name} must be finite, got {c}"))),
            Coupling::Samples(v) if v.is_empty() => Err(Error::InvalidParameter(format!("{name}: empty sample table"))),
            Coupling::Samples(v) if v.iter().any(|x| !x.is_finite()) => Err(Error::InvalidParameter(format!("{name}: non-finite sample"))),
            _ => Ok(()),
        }
    }
}

fn trig_interpolate(v: &[f64], t: f64) -> f64 {
    let m = v.len();
    if m == 1 {
        return v[0];
    }
    let h = 2.0 * PI / m as f64;
    let half = m / 2;
    let mut acc = 0.0;
    for (j, &vj) in v.iter().enumerate() {
        let u = t - j as f64 * h;
        // cardinal function of the degree-⌊M/2⌋ interpolant
        let mut l = 1.0;
        for q in 1..=half {
            let c = (q as f64 * u).cos();
            l += if 2 * q == m { c } else { 2.0 * c };
        }
        acc += vj * l / m as f64;
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    Dirichlet,
    Neumann,
    /// `γ₁^±u = b_± γ₀^±u`.
    Robin {
        b_minus: Coupling,
        b_plus: Coupling,
    },
    /// `γ₀u` continuous, `α γ₀u = [γ₁]u`.
    Delta {
        alpha: Coupling,
    },
    /// `γ₁u` continuous, `β γ₁u = [γ₀]u`.
    DeltaPrime {
        beta: Coupling,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    FullCurve,
    Arc { t0: f64, t1: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCondition {
    pub condition: Condition,
    pub support: Support,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockLayout {
    SinglePhi,
    SinglePsi,
    TwoByTwo,
}

impl BoundaryCondition {
    pub fn new(condition: Condition) -> Self {
        BoundaryCondition { condition, support: Support::FullCurve }
    }

    pub fn dirichlet() -> Self {
        Self::new(Condition::Dirichlet)
    }

    pub fn neumann() -> Self {
        Self::new(Condition::Neumann)
    }

    pub fn robin(b_minus: f64, b_plus: f64) -> Self {
        Self::new(Condition::Robin { b_minus: Coupling::Constant(b_minus), b_plus: Coupling::Constant(b_plus) })
    }

    pub fn delta(alpha: f64) -> Self {
        Self::new(Condition::Delta { alpha: Coupling::Constant(alpha) })
    }

    pub fn delta_prime(beta: f64) -> Self {
        Self::new(Condition::DeltaPrime { beta: Coupling::Constant(beta) })
    }

    pub fn on_arc(mut self, t0: f64, t1: f64) -> Self {
        self.support = Support::Arc { t0, t1 };
        self
    }

    pub fn layout(&self) -> BlockLayout {
        match self.condition {
            Condition::Dirichlet | Condition::Delta { .. } => BlockLayout::SinglePhi,
            Condition::Neumann | Condition::DeltaPrime { .. } => BlockLayout::SinglePsi,
            Condition::Robin { .. } => BlockLayout::TwoByTwo,
        }
    }

    /// Short machine-friendly name.
    pub fn kind_name(&self) -> &'static str {
        match self.condition {
            Condition::Dirichlet => "dirichlet",
            Condition::Neumann => "neumann",
            Condition::Robin { .. } => "robin",
            Condition::Delta { .. } => "delta",
            Condition::DeltaPrime { .. } => "delta_prime",
        }
    }

    /// Parameter checks on a dense sampling of the support.
    ///
    /// Robin needs `b₊ ≠ b₋` everywhere; on an arc the stronger `b₋ > b₊`
    /// is required. Zero δ/δ′ couplings are accepted (free propagation
    /// there).
    pub fn validate(&self) -> Result<()> {
        let samples: Vec<f64> = match self.support {
            Support::FullCurve => (0..1024).map(|j| 2.0 * PI * j as f64 / 1024.0).collect(),
            Support::Arc { t0, t1 } => {
                if !(t0.is_finite() && t1.is_finite() && t1 > t0 && t1 - t0 < 2.0 * PI) {
                    return Err(Error::InvalidParameter(format!("arc support needs t0 < t1 < t0 + 2π, got [{t0}, {t1}]")));
                }
                (0..=1024).map(|j| t0 + (t1 - t0) * j as f64 / 1024.0).collect()
            }
        };
        self.check_points(&samples)
    }

    fn check_points(&self, ts: &[f64]) -> Result<()> {
        match &self.condition {
            Condition::Robin { b_minus, b_plus } => {
                b_minus.check("b_minus")?;
                b_plus.check("b_plus")?;
                for &t in ts {
                    let (bm, bp) = (b_minus.at(t), b_plus.at(t));
                    let arc = matches!(self.support, Support::Arc { .. });
                    if arc && bm <= bp {
                        return Err(Error::InvalidParameter(format!("Robin on an arc needs b_minus > b_plus (t = {t:.4}: {bm} vs {bp})")));
                    }
                    if (bp - bm).abs() <= 1e-12 * (1.0 + bp.abs() + bm.abs()) {
                        return Err(Error::InvalidParameter(format!("Robin jump b_plus - b_minus vanishes at t = {t:.4}")));
                    }
                }
                Ok(())
            }
            Condition::Delta { alpha } => alpha.check("alpha"),
            Condition::DeltaPrime { beta } => beta.check("beta"),
            _ => Ok(()),
        }
    }

    /// Validation plus the requirement that all couplings be constants.
    pub fn validate_constants(&self) -> Result<()> {
        self.validate()?;
        let constant = |c: &Coupling| c.as_constant().is_some();
        let ok = match &self.condition {
            Condition::Robin { b_minus, b_plus } => constant(b_minus) && constant(b_plus),
            Condition::Delta { alpha } => constant(alpha),
            Condition::DeltaPrime { beta } => constant(beta),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("constant couplings required".into()))
        }
    }

    /// Whether every coupling is identically zero (δ/δ′ only).
    pub fn is_free(&self) -> bool {
        match &self.condition {
            Condition::Delta { alpha: c } | Condition::DeltaPrime { beta: c } => match c {
                Coupling::Constant(v) => *v == 0.0,
                Coupling::Samples(v) => v.iter().all(|x| *x == 0.0),
            },
            _ => false,
        }
    }

    /// Quadrature grid on the support of this condition.
    pub fn grid(&self, curve: &ClosedCurve, n: usize) -> Result<BoundaryGrid> {
        match self.support {
            Support::FullCurve => crate::geometry::build_grid(curve, n),
            Support::Arc { t0, t1 } => crate::geometry::build_arc_grid(&ArcSpec { parent: curve.clone(), t0, t1 }, n),
        }
    }

    fn check_grid(&self, grid: &BoundaryGrid) -> Result<()> {
        let matches = match (self.support, grid.kind) {
            (Support::FullCurve, GridKind::Closed) => true,
            (Support::Arc { t0, t1 }, GridKind::Arc { t0: g0, t1: g1 }) => t0 == g0 && t1 == g1,
            _ => false,
        };
        if !matches {
            return Err(Error::InvalidGrid("grid does not match the boundary-condition support".into()));
        }
        self.validate()?;
        self.check_points(&grid.params)
    }
}

/// Dirichlet and Neumann traces `(γ₀u, γ₁u)` of a field at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Traces {
    pub dirichlet: Vec<Complex64>,
    pub neumann: Vec<Complex64>,
}

/// Jump densities: `φ = −[γ₁]u` multiplies SL, `ψ = [γ₀]u` multiplies DL.
#[derive(Debug, Clone, PartialEq)]
pub struct Densities {
    pub phi: Vec<Complex64>,
    pub psi: Vec<Complex64>,
}

/// `γ₀u° = e^{ik d·x}`, `γ₁u° = ik (d·ν) e^{ik d·x}` at the nodes.
pub fn trace_plane_wave(k: f64, incident: [f64; 2], grid: &BoundaryGrid) -> Result<Traces> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter(format!("plane waves need k > 0, got {k}")));
    }
    let norm = incident[0].hypot(incident[1]);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("incident direction must be a unit vector (|d| = {norm})")));
    }
    let mut dirichlet = Vec::with_capacity(grid.len());
    let mut neumann = Vec::with_capacity(grid.len());
    for (x, nu) in grid.points.iter().zip(&grid.normals) {
        let e = Complex64::from_polar(1.0, k * (incident[0] * x[0] + incident[1] * x[1]));
        dirichlet.push(e);
        neumann.push(Complex64::new(0.0, k * (incident[0] * nu[0] + incident[1] * nu[1])) * e);
    }
    Ok(Traces { dirichlet, neumann })
}

#[derive(Debug, Clone, Copy)]
enum Scaling {
    None,
    /// δ: `(1 + αV)φ′ = αg`, `φ = −φ′`.
    Delta,
    /// δ′: `(1 − βT)ψ = βh`.
    DeltaPrime,
}

/// A factorised Weyl system on one grid.
pub struct WeylSystem {
    pub bc: BoundaryCondition,
    pub s: SpectralParameter,
    pub layout: BlockLayout,
    /// The matrix actually factorised (second-kind scaled form for δ, δ′).
    pub matrix: CMatrix,
    /// Estimated 1-norm condition number of `matrix`.
    pub condition: f64,
    pub ops: LayerOperatorSet,
    coupling: Vec<f64>,
    scaling: Scaling,
    lu: LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl std::fmt::Debug for WeylSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeylSystem")
            .field("bc", &self.bc)
            .field("s", &self.s)
            .field("layout", &self.layout)
            .field("size", &self.matrix.nrows())
            .field("condition", &self.condition)
            .finish()
    }
}

fn sample(c: &Coupling, grid: &BoundaryGrid) -> Vec<f64> {
    grid.params.iter().map(|&t| c.at(t)).collect()
}

/// `B_Θ`, the `z`-independent part of `W = B_Θ − Π γG_z Π′`. Undefined
/// (error) for δ/δ′ couplings with zeros.
pub fn b_theta(bc: &BoundaryCondition, grid: &BoundaryGrid) -> Result<CMatrix> {
    let n = grid.len();
    let inv = |c: &Coupling, name: &str| -> Result<Vec<f64>> {
        let v = sample(c, grid);
        if v.contains(&0.0) {
            return Err(Error::InvalidParameter(format!("B_Θ needs a nonvanishing {name}")));
        }
        Ok(v.iter().map(|x| 1.0 / x).collect())
    };
    let diag = |d: &[f64]| CMatrix::from_fn(d.len(), d.len(), |i, j| if i == j { d[i].into() } else { ZERO });
    Ok(match &bc.condition {
        Condition::Dirichlet | Condition::Neumann => CMatrix::zeros(n, n),
        Condition::Delta { alpha } => -diag(&inv(alpha, "alpha")?),
        Condition::DeltaPrime { beta } => diag(&inv(beta, "beta")?),
        Condition::Robin { b_minus, b_plus } => {
            let bm = sample(b_minus, grid);
            let bp = sample(b_plus, grid);
            let mut m = CMatrix::zeros(2 * n, 2 * n);
            for j in 0..n {
                let jump = bp[j] - bm[j];
                let mean = 0.5 * (bp[j] + bm[j]);
                m[(j, j)] = (-1.0 / jump).into();
                m[(j, n + j)] = (-mean / jump).into();
                m[(n + j, j)] = (-mean / jump).into();
                m[(n + j, n + j)] = (-bp[j] * bm[j] / jump).into();
            }
            m
        }
    })
}

/// `Π γG Π′` for the block layout.
fn select(layout: BlockLayout, ops: &LayerOperatorSet) -> CMatrix {
    match layout {
        BlockLayout::SinglePhi => ops.v.clone(),
        BlockLayout::SinglePsi => ops.t.clone(),
        BlockLayout::TwoByTwo => ops.block(),
    }
}

/// Weyl function `M_z = γG_ref − γG_z` in `2n × 2n` block form.
pub fn weyl_function(s: &SpectralParameter, reference: &SpectralParameter, grid: &BoundaryGrid) -> Result<CMatrix> {
    Ok(assemble(reference, grid)?.block() - assemble(s, grid)?.block())
}

/// `Θ + Π M_z Π′` with `Θ = B_Θ − Π γG_ref Π′`, assembled from the Kreĭn
/// split with reference point `z = 1`. Equals [`WeylSystem::weyl_matrix`].
pub fn assemble_weyl_krein(bc: &BoundaryCondition, s: &SpectralParameter, grid: &BoundaryGrid) -> Result<CMatrix> {
    bc.check_grid(grid)?;
    let reference = SpectralParameter::off_axis(Complex64::new(1.0, 0.0))?;
    let ops_ref = assemble(&reference, grid)?;
    let layout = bc.layout();
    let theta = b_theta(bc, grid)? - select(layout, &ops_ref);
    let m = weyl_function(s, &reference, grid)?;
    let n = grid.len();
    let pm = match layout {
        BlockLayout::SinglePhi => m.view((0, 0), (n, n)).into_owned(),
        BlockLayout::SinglePsi => m.view((n, n), (n, n)).into_owned(),
        BlockLayout::TwoByTwo => m,
    };
    Ok(theta + pm)
}

/// One-norm condition estimate (Hager–Higham) from an LU factorisation.
fn condition_estimate(a: &CMatrix, lu: &LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>) -> f64 {
    let n = a.nrows();
    let norm_a = (0..n).map(|j| a.column(j).iter().map(|c| c.norm()).sum::<f64>()).fold(0.0, f64::max);
    let l = lu.l();
    let u = lu.u();
    let p = lu.p();
    let solve = |b: &DVector<Complex64>| lu.solve(b);
    // A^H x = b  ⇔  U^H L^H P x = b
    let solve_adj = |b: &DVector<Complex64>| -> Option<DVector<Complex64>> {
        let y = u.ad_solve_upper_triangular(b)?;
        let mut x = l.ad_solve_lower_triangular(&y)?;
        p.inv_permute_rows(&mut x);
        Some(x)
    };
    let mut x = DVector::from_element(n, Complex64::from(1.0 / n as f64));
    let mut est = 0.0;
    let mut last = usize::MAX;
    for _ in 0..5 {
        let Some(y) = solve(&x) else { return f64::INFINITY };
        est = y.iter().map(|c| c.norm()).sum::<f64>();
        let xi = y.map(|c| if c.norm() > 0.0 { c / c.norm() } else { Complex64::from(1.0) });
        let Some(z) = solve_adj(&xi) else { return f64::INFINITY };
        let (jmax, zmax) = z.iter().enumerate().fold((0, 0.0), |(bj, bv), (j, c)| if c.norm() > bv { (j, c.norm()) } else { (bj, bv) });
        let ztx = z.dotc(&x).re;
        if zmax <= ztx || jmax == last {
            break;
        }
        last = jmax;
        x = DVector::from_element(n, ZERO);
        x[jmax] = Complex64::from(1.0);
    }
    if !est.is_finite() {
        return f64::INFINITY;
    }
    norm_a * est
}

pub fn assemble_weyl(bc: &BoundaryCondition, s: &SpectralParameter, grid: &BoundaryGrid) -> Result<WeylSystem> {
    bc.check_grid(grid)?;
    let ops = assemble(s, grid)?;
    assemble_weyl_from(bc, ops)
}

/// As [`assemble_weyl`], reusing assembled layer operators.
pub fn assemble_weyl_from(bc: &BoundaryCondition, ops: LayerOperatorSet) -> Result<WeylSystem> {
    bc.check_grid(&ops.grid)?;
    let grid = &ops.grid;
    let n = grid.len();
    let layout = bc.layout();
    let eye = CMatrix::identity(n, n);
    let (matrix, coupling, scaling) = match &bc.condition {
        Condition::Dirichlet => (-ops.v.clone(), vec![], Scaling::None),
        Condition::Neumann => (-ops.t.clone(), vec![], Scaling::None),
        Condition::Delta { alpha } => {
            let a = sample(alpha, grid);
            let m = CMatrix::from_fn(n, n, |i, j| eye[(i, j)] + a[i] * ops.v[(i, j)]);
            (m, a, Scaling::Delta)
        }
        Condition::DeltaPrime { beta } => {
            let b = sample(beta, grid);
            let m = CMatrix::from_fn(n, n, |i, j| eye[(i, j)] - b[i] * ops.t[(i, j)]);
            (m, b, Scaling::DeltaPrime)
        }
        Condition::Robin { .. } => (b_theta(bc, grid)? - ops.block(), vec![], Scaling::None),
    };
    let lu = matrix.clone().lu();
    let condition = condition_estimate(&matrix, &lu);
    if condition.is_nan() || condition >= SINGULAR_CONDITION {
        return Err(Error::Singular { condition, detail: format!("{} condition, {} nodes", bc.kind_name(), n) });
    }
    Ok(WeylSystem { bc: bc.clone(), s: ops.s, layout, matrix, condition, ops, coupling, scaling, lu })
}

impl WeylSystem {
    pub fn grid(&self) -> &BoundaryGrid {
        &self.ops.grid
    }

    /// Size of the unknown vector.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Unscaled `W = B_Θ − Π γG_z Π′`; fails where δ/δ′ couplings vanish.
    pub fn weyl_matrix(&self) -> Result<CMatrix> {
        Ok(b_theta(&self.bc, self.grid())? - select(self.layout, &self.ops))
    }

    /// `Π γ u` for the layout: `g`, `h` or `(g, h)`.
    pub fn select_rhs(&self, traces: &Traces) -> Result<Vec<Complex64>> {
        let n = self.grid().len();
        if traces.dirichlet.len() != n || traces.neumann.len() != n {
            return Err(Error::Dimension(format!("traces of length {} on {} nodes", traces.dirichlet.len(), n)));
        }
        Ok(match self.layout {
            BlockLayout::SinglePhi => traces.dirichlet.clone(),
            BlockLayout::SinglePsi => traces.neumann.clone(),
            BlockLayout::TwoByTwo => traces.dirichlet.iter().chain(&traces.neumann).copied().collect(),
        })
    }

    /// Solves `W x = rhs` for several right-hand sides at once (columns).
    pub fn solve_selected(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if rhs.nrows() != self.dim() {
            return Err(Error::Dimension(format!("rhs has {} rows, system has {}", rhs.nrows(), self.dim())));
        }
        let scaled = match self.scaling {
            Scaling::None => rhs.clone(),
            Scaling::Delta | Scaling::DeltaPrime => CMatrix::from_fn(rhs.nrows(), rhs.ncols(), |i, j| rhs[(i, j)] * self.coupling[i]),
        };
        let mut x =
            self.lu.solve(&scaled).ok_or_else(|| Error::Singular { condition: self.condition, detail: "LU solve failed".into() })?;
        if let Scaling::Delta = self.scaling {
            x.neg_mut();
        }
        Ok(x)
    }

    fn unpack(&self, x: &[Complex64]) -> Densities {
        let n = self.grid().len();
        let zero = vec![ZERO; n];
        match self.layout {
            BlockLayout::SinglePhi => Densities { phi: x.to_vec(), psi: zero },
            BlockLayout::SinglePsi => Densities { phi: zero, psi: x.to_vec() },
            BlockLayout::TwoByTwo => Densities { phi: x[..n].to_vec(), psi: x[n..].to_vec() },
        }
    }

    pub fn solve_many(&self, traces: &[Traces]) -> Result<Vec<Densities>> {
        if traces.is_empty() {
            return Ok(vec![]);
        }
        let cols: Vec<Vec<Complex64>> = traces.iter().map(|t| self.select_rhs(t)).collect::<Result<_>>()?;
        let rhs = CMatrix::from_fn(self.dim(), cols.len(), |i, j| cols[j][i]);
        let x = self.solve_selected(&rhs)?;
        Ok((0..cols.len()).map(|j| self.unpack(x.column(j).as_slice())).collect())
    }
}

pub fn solve_weyl(system: &WeylSystem, rhs: &Traces) -> Result<Densities> {
    Ok(system.solve_many(std::slice::from_ref(rhs))?.remove(0))
}

/// One-sided traces `(γ₀^+u, γ₀^−u, γ₁^+u, γ₁^−u)` of `u = u_inc + SLφ + DLψ`.
pub fn total_traces(ops: &LayerOperatorSet, incident: &Traces, dens: &Densities) -> [Vec<Complex64>; 4] {
    let phi = DVector::from_column_slice(&dens.phi);
    let psi = DVector::from_column_slice(&dens.psi);
    let g0 = &ops.v * &phi + &ops.k * &psi;
    let g1 = &ops.k_adj * &phi + &ops.t * &psi;
    let n = ops.grid.len();
    let mut out = [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]];
    for j in 0..n {
        out[0][j] = incident.dirichlet[j] + g0[j] + 0.5 * dens.psi[j];
        out[1][j] = incident.dirichlet[j] + g0[j] - 0.5 * dens.psi[j];
        out[2][j] = incident.neumann[j] + g1[j] - 0.5 * dens.phi[j];
        out[3][j] = incident.neumann[j] + g1[j] + 0.5 * dens.phi[j];
    }
    out
}

/// Max-norm residual of the boundary condition for the solved densities,
/// relative to the max-norm of the incident traces.
pub fn boundary_residual(system: &WeylSystem, incident: &Traces, dens: &Densities) -> f64 {
    let [u0p, u0m, u1p, u1m] = total_traces(&system.ops, incident, dens);
    let grid = system.grid();
    let n = grid.len();
    let scale = incident.dirichlet.iter().chain(&incident.neumann).map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let t = grid.params[j];
        let r: Vec<Complex64> = match &system.bc.condition {
            Condition::Dirichlet => vec![u0p[j], u0m[j]],
            Condition::Neumann => vec![u1p[j], u1m[j]],
            Condition::Delta { alpha } => {
                let a = alpha.at(t);
                vec![u0p[j] - u0m[j], a * u0p[j] - (u1p[j] - u1m[j])]
            }
            Condition::DeltaPrime { beta } => {
                let b = beta.at(t);
                vec![u1p[j] - u1m[j], b * u1p[j] - (u0p[j] - u0m[j])]
            }
            Condition::Robin { b_minus, b_plus } => {
                vec![u1p[j] - b_plus.at(t) * u0p[j], u1m[j] - b_minus.at(t) * u0m[j]]
            }
        };
        for c in r {
            worst = worst.max(c.norm());
        }
    }
    worst / scale
}

/// Weighted asymmetry `max |(ΩW)_ij − (ΩW)_ji| / max |ΩW|` with the block
/// quadrature weights `Ω`.
pub fn weighted_asymmetry(m: &CMatrix, weights: &[f64]) -> f64 {
    let n = m.nrows();
    let w = |i: usize| weights[i % weights.len()];
    let mut scale: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            scale = scale.max((w(i) * m[(i, j)]).norm());
            if j > i {
                worst = worst.max((w(i) * m[(i, j)] - w(j) * m[(j, i)]).norm());
            }
        }
    }
    worst / scale
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<WeylSystem>();
    check::<DMatrix<Complex64>>();
}
