//! Nyström discretisation of the single- and double-layer boundary operators,
//! off-surface potentials and far-field patterns.
//!
//! Matrices act on nodal density values; quadrature weights are folded in.
//! Log-singular kernels are split as `A·ln(4 sin²((t−τ)/2)) + B` and the log
//! part is integrated with the trigonometric product weights of Kress. On
//! arcs the same rule runs in the cosine variable `s`, where the densities
//! extend evenly/oddly to smooth `2π`-periodic functions.
//!
//! Sign conventions (`+` is the exterior, `ν` the outward normal):
//! `γ₀^±DL = K ± ½`, `γ₁^±SL = K′ ∓ ½`, so `[γ₁]SLφ = −φ` and `[γ₀]DLψ = ψ`.

use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, GridKind, Point};
use crate::specfun::{kernel_parts, kernel_regular_limit, SpectralParameter};
use crate::CMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
/// Coefficient of `ln r²` in every kernel as `r → 0`.
const LOG_COEFF_AT_ZERO: f64 = -1.0 / (4.0 * PI);

/// `V = γ₀SL`, `K = γ₀DL`, `K′ = γ₁SL`, `T = γ₁DL` on one grid.
/// `K` and `K′` are the averages of the two one-sided traces.
#[derive(Debug, Clone)]
pub struct LayerOperatorSet {
    pub s: SpectralParameter,
    pub grid: BoundaryGrid,
    pub v: CMatrix,
    pub k: CMatrix,
    pub k_adj: CMatrix,
    pub t: CMatrix,
}

/// `R(t) = −(2π/n) Σ_{m<n} cos(mt)/m − (π/n²) cos(nt)` for `2n` nodes.
fn kress_weight(n: usize, t: f64) -> f64 {
    let mut acc = 0.0;
    for m in 1..n {
        acc += (m as f64 * t).cos() / m as f64;
    }
    -2.0 * PI / n as f64 * acc - PI / (n * n) as f64 * (n as f64 * t).cos()
}

struct Layout {
    /// Product log weights `R_ij`.
    log_w: DMatrix<f64>,
    /// The logarithm the weights integrate exactly, `L_ij` (i ≠ j).
    log_l: DMatrix<f64>,
    /// `lim (ln r² − L)` on the diagonal.
    diag_offset: Vec<f64>,
    step: f64,
    speed: Vec<f64>,
}

fn layout(grid: &BoundaryGrid) -> Layout {
    let n = grid.len();
    let speed = grid.node_speed();
    match grid.kind {
        GridKind::Closed => {
            let table: Vec<f64> = (0..n).map(|m| kress_weight(n / 2, 2.0 * PI * m as f64 / n as f64)).collect();
            let log_w = DMatrix::from_fn(n, n, |i, j| table[(i + n - j) % n]);
            let log_l = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    0.0
                } else {
                    let d = 0.5 * (grid.nodes[i] - grid.nodes[j]);
                    (4.0 * d.sin().powi(2)).ln()
                }
            });
            let diag_offset = grid.jacobians.iter().map(|j| (j * j).ln()).collect();
            Layout { log_w, log_l, diag_offset, step: 2.0 * PI / n as f64, speed }
        }
        GridKind::Arc { t0, t1 } => {
            let c = 0.5 * (t1 - t0);
            let table: Vec<f64> = (0..2 * n).map(|m| kress_weight(n, PI * m as f64 / n as f64)).collect();
            // nodes s_j = (j + ½)π/n: s_i − s_j = (i−j)π/n, s_i + s_j = (i+j+1)π/n
            let log_w = DMatrix::from_fn(n, n, |i, j| table[(i + 2 * n - j) % (2 * n)] + table[(i + j + 1) % (2 * n)]);
            let log_l =
                DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { (4.0 * (grid.nodes[i].cos() - grid.nodes[j].cos()).powi(2)).ln() });
            let diag_offset = grid.jacobians.iter().map(|j| (j * j * c * c / 4.0).ln()).collect();
            Layout { log_w, log_l, diag_offset, step: PI / n as f64, speed }
        }
    }
}

fn check_grid(grid: &BoundaryGrid) -> Result<()> {
    let n = grid.len();
    let ok = match grid.kind {
        GridKind::Closed => n >= 8 && n % 2 == 0,
        GridKind::Arc { .. } => n >= 8,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidGrid(format!("grid with {n} nodes is below the minimum size")))
    }
}

/// Spectral differentiation matrix on `m` (even) equispaced periodic nodes,
/// as a function of the index difference.
fn cot_entry(m: usize, diff: i64, h: f64) -> f64 {
    let d = diff.rem_euclid(m as i64);
    if d == 0 {
        return 0.0;
    }
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    0.5 * sign / (0.5 * d as f64 * h).tan()
}

/// `(D_left, D_right)` such that the tangential part of Maue's formula is
/// `diag(1/speed) · D_left · V̂ · D_right`.
fn maue_derivatives(grid: &BoundaryGrid) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = grid.len();
    match grid.kind {
        GridKind::Closed => {
            let h = 2.0 * PI / n as f64;
            let d = DMatrix::from_fn(n, n, |i, j| cot_entry(n, i as i64 - j as i64, h));
            (d.clone(), d)
        }
        GridKind::Arc { .. } => {
            // Fold the 2n-point matrix with the mirror node −s_j ≡ s_{2n−1−j}.
            let h = PI / n as f64;
            let direct = |i: usize, j: usize| cot_entry(2 * n, i as i64 - j as i64, h);
            let mirror = |i: usize, j: usize| cot_entry(2 * n, i as i64 - (2 * n - 1 - j) as i64, h);
            let even = DMatrix::from_fn(n, n, |i, j| direct(i, j) + mirror(i, j));
            let odd = DMatrix::from_fn(n, n, |i, j| direct(i, j) - mirror(i, j));
            (even, odd)
        }
    }
}

fn real_left(d: &DMatrix<f64>, m: &CMatrix) -> CMatrix {
    let re = d * m.map(|c| c.re);
    let im = d * m.map(|c| c.im);
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)]))
}

fn real_right(m: &CMatrix, d: &DMatrix<f64>) -> CMatrix {
    let re = m.map(|c| c.re) * d;
    let im = m.map(|c| c.im) * d;
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)]))
}

pub fn assemble(s: &SpectralParameter, grid: &BoundaryGrid) -> Result<LayerOperatorSet> {
    s.validate()?;
    check_grid(grid)?;
    let n = grid.len();
    let lay = layout(grid);
    let reg = kernel_regular_limit(s);
    let h = lay.step;

    let rows: Vec<[Vec<Complex64>; 3]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = grid.points[i];
            let nx = grid.normals[i];
            let mut v = vec![ZERO; n];
            let mut kd = vec![ZERO; n];
            let mut ka = vec![ZERO; n];
            for j in 0..n {
                let sp = lay.speed[j];
                let rw = lay.log_w[(i, j)];
                if i == j {
                    let a0 = LOG_COEFF_AT_ZERO;
                    v[j] = (rw * a0 + h * (reg + a0 * lay.diag_offset[i])) * sp;
                    let diag = -grid.curvature[i] / (4.0 * PI);
                    kd[j] = Complex64::from(h * diag * sp);
                    ka[j] = kd[j];
                    continue;
                }
                let y = grid.points[j];
                let ny = grid.normals[j];
                let d = [y[0] - x[0], y[1] - x[1]];
                let r = d[0].hypot(d[1]);
                let p = kernel_parts(s, r);
                let l = lay.log_l[(i, j)];
                v[j] = (rw * p.log_g + h * (p.g - p.log_g * l)) * sp;
                let cy = (d[0] * ny[0] + d[1] * ny[1]) / r;
                let cx = -(d[0] * nx[0] + d[1] * nx[1]) / r;
                let (kk, ak) = (p.dg * cy, p.log_dg * cy);
                kd[j] = (rw * ak + h * (kk - ak * l)) * sp;
                let (kk, ak) = (p.dg * cx, p.log_dg * cx);
                ka[j] = (rw * ak + h * (kk - ak * l)) * sp;
            }
            [v, kd, ka]
        })
        .collect();

    let v = CMatrix::from_fn(n, n, |i, j| rows[i][0][j]);
    let k = CMatrix::from_fn(n, n, |i, j| rows[i][1][j]);
    let k_adj = CMatrix::from_fn(n, n, |i, j| rows[i][2][j]);

    // Maue: T = ∂_σ V ∂_σ − z (ν_x·ν_y) V.
    let (d_left, d_right) = maue_derivatives(grid);
    let v_hat = CMatrix::from_fn(n, n, |i, j| v[(i, j)] / lay.speed[j]);
    let mut t = real_left(&d_left, &real_right(&v_hat, &d_right));
    let kappa2 = -s.z();
    for i in 0..n {
        for j in 0..n {
            let nn = grid.normals[i][0] * grid.normals[j][0] + grid.normals[i][1] * grid.normals[j][1];
            t[(i, j)] = t[(i, j)] / lay.speed[i] + kappa2 * nn * v[(i, j)];
        }
    }
    Ok(LayerOperatorSet { s: *s, grid: grid.clone(), v, k, k_adj, t })
}

impl LayerOperatorSet {
    /// The boundary block `γ G_z` = `[[V, K], [K′, T]]` acting on `(φ, ψ)`.
    pub fn block(&self) -> CMatrix {
        let n = self.grid.len();
        let mut m = CMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.v);
        m.view_mut((0, n), (n, n)).copy_from(&self.k);
        m.view_mut((n, 0), (n, n)).copy_from(&self.k_adj);
        m.view_mut((n, n), (n, n)).copy_from(&self.t);
        m
    }
}

fn check_density(grid: &BoundaryGrid, phi: &[Complex64], psi: &[Complex64]) -> Result<()> {
    if phi.len() != grid.len() || psi.len() != grid.len() {
        return Err(Error::Dimension(format!("densities of length {}/{} on a grid of {} nodes", phi.len(), psi.len(), grid.len())));
    }
    Ok(())
}

/// Width of the band around the curve where plain quadrature of the layer
/// potentials is unreliable.
pub fn exclusion_distance(grid: &BoundaryGrid) -> f64 {
    3.0 * grid.max_spacing()
}

pub fn in_exclusion_band(grid: &BoundaryGrid, p: Point) -> bool {
    grid.distance_to_curve(p) <= exclusion_distance(grid)
}

/// `SLφ + DLψ` at off-surface points by plain quadrature. Points inside the
/// exclusion band are evaluated anyway; callers can test them with
/// [`in_exclusion_band`].
pub fn eval_potential(
    s: &SpectralParameter,
    grid: &BoundaryGrid,
    phi: &[Complex64],
    psi: &[Complex64],
    points: &[Point],
) -> Result<Vec<Complex64>> {
    s.validate()?;
    check_density(grid, phi, psi)?;
    let w = grid.density_weights();
    points
        .par_iter()
        .map(|&x| {
            let mut acc = ZERO;
            for j in 0..grid.len() {
                if phi[j] == ZERO && psi[j] == ZERO {
                    continue;
                }
                let y = grid.points[j];
                let ny = grid.normals[j];
                let d = [y[0] - x[0], y[1] - x[1]];
                let r = d[0].hypot(d[1]);
                if r == 0.0 {
                    return Err(Error::Domain("evaluation point coincides with a boundary node".into()));
                }
                let p = kernel_parts(s, r);
                let cy = (d[0] * ny[0] + d[1] * ny[1]) / r;
                acc += (p.g * phi[j] + p.dg * cy * psi[j]) * w[j];
            }
            Ok(acc)
        })
        .collect()
}

/// Gradient of `SLφ + DLψ` at off-surface points.
pub fn eval_potential_gradient(
    s: &SpectralParameter,
    grid: &BoundaryGrid,
    phi: &[Complex64],
    psi: &[Complex64],
    points: &[Point],
) -> Result<Vec<[Complex64; 2]>> {
    s.validate()?;
    check_density(grid, phi, psi)?;
    let z = s.z();
    let w = grid.density_weights();
    points
        .par_iter()
        .map(|&x| {
            let mut acc = [ZERO; 2];
            for j in 0..grid.len() {
                let y = grid.points[j];
                let ny = grid.normals[j];
                // d = x − y
                let d = [x[0] - y[0], x[1] - y[1]];
                let r = d[0].hypot(d[1]);
                if r == 0.0 {
                    return Err(Error::Domain("evaluation point coincides with a boundary node".into()));
                }
                let p = kernel_parts(s, r);
                let d2g = z * p.g - p.dg / r;
                let dn = d[0] * ny[0] + d[1] * ny[1];
                for c in 0..2 {
                    let sl = p.dg * d[c] / r;
                    let dl = -d2g * dn * d[c] / (r * r) + p.dg * (-ny[c] / r + dn * d[c] / (r * r * r));
                    acc[c] += (sl * phi[j] + dl * psi[j]) * w[j];
                }
            }
            Ok(acc)
        })
        .collect()
}

/// Far-field pattern `F(x̂) = ∫ e^{−ik x̂·y} [φ(y) − ik x̂·ν(y) ψ(y)] dσ(y)`;
/// the outgoing potential behaves like `c(k) e^{ik|x|} |x|^{−1/2} F(x̂)` with
/// `c(k)` from [`crate::specfun::far_field_constant`].
pub fn far_field_row(k: f64, grid: &BoundaryGrid, phi: &[Complex64], psi: &[Complex64], directions: &[Point]) -> Result<Vec<Complex64>> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter(format!("far field needs k > 0, got {k}")));
    }
    check_density(grid, phi, psi)?;
    let w = grid.density_weights();
    Ok(directions
        .iter()
        .map(|dir| {
            let mut acc = ZERO;
            for j in 0..grid.len() {
                let y = grid.points[j];
                let ny = grid.normals[j];
                let phase = Complex64::from_polar(1.0, -k * (dir[0] * y[0] + dir[1] * y[1]));
                let dn = dir[0] * ny[0] + dir[1] * ny[1];
                acc += phase * (phi[j] - Complex64::new(0.0, k * dn) * psi[j]) * w[j];
            }
            acc
        })
        .collect())
}
