//! Scattering amplitude, on-shell scattering matrix, generalized
//! eigenfunctions and perturbed resolvent kernels.
//!
//! Amplitude convention: rows are outgoing directions, columns incident
//! ones, and
//!
//! ```text
//! s[out, in] = (i/4π) Σ_j ω_j conj(density_in(x_j)) · trace_out(x_j)
//!            = (i/4π) conj(F_in(x̂_out)),
//! ```
//!
//! the pairing being conjugate-linear in the density slot. The density comes
//! from the outgoing (`Minus`) Weyl system, `F_in` is the far-field pattern of
//! the scattered wave (see [`crate::layerops::far_field_row`]) and `ω_j` are
//! the density weights. With this choice `S = I − s·(2π/M)` is unitary and on
//! the circle `s(θ_o, θ_i) = −(1/π) Σ conj(c_n) e^{−in(θ_o − θ_i)}`, so each
//! partial wave contributes the eigenvalue `1 + 2 conj(c_n)` to `S`.

use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, ClosedCurve, Point};
use crate::layerops::{eval_potential, far_field_row, in_exclusion_band};
use crate::specfun::{far_field_constant, kernel_parts, Branch, SpectralParameter};
use crate::weyl::{assemble_weyl, trace_plane_wave, BoundaryCondition, Densities, Traces, WeylSystem};
use crate::CMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `M` equispaced directions on the unit circle with trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid {
    pub angles: Vec<f64>,
    pub directions: Vec<Point>,
    pub weight: f64,
}

impl DirectionGrid {
    pub fn uniform(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidGrid(format!("direction grid needs M >= 2, got {m}")));
        }
        let angles: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
        let directions = angles.iter().map(|a| [a.cos(), a.sin()]).collect();
        Ok(DirectionGrid { angles, directions, weight: 2.0 * PI / m as f64 })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Index of `−ξ̂_m` (requires even `M`).
    pub fn opposite(&self, m: usize) -> Option<usize> {
        let n = self.len();
        (n % 2 == 0).then(|| (m + n / 2) % n)
    }
}

/// Which slot of the amplitude is which; recorded in every result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmplitudeConvention {
    /// `s[out, in]`, conjugate-linear in the incident density.
    #[default]
    RowOutgoingColumnIncident,
}

impl AmplitudeConvention {
    pub fn argument_order(&self) -> &'static str {
        "s[row = outgoing direction, column = incident direction]; pairing conjugates the incident density"
    }

    pub fn normalization(&self) -> &'static str {
        "s = (i/4pi) conj(F_in(out)); scattered wave ~ c(k) e^{ik|x|} |x|^{-1/2} F, c(k) = (i/4) sqrt(2/(pi k)) e^{-i pi/4}"
    }
}

#[derive(Debug, Clone)]
pub struct FarField {
    pub k: f64,
    pub bc: BoundaryCondition,
    pub dirs: DirectionGrid,
    /// `s[out, in]`.
    pub amplitude: CMatrix,
    pub branch: Branch,
    pub convention: AmplitudeConvention,
    /// Condition estimate of the Weyl system used.
    pub condition: f64,
}

#[derive(Debug, Clone)]
pub struct SMatrix {
    pub matrix: CMatrix,
}

/// A curve, a boundary condition (whose support selects the arc, if any) and
/// the number of boundary nodes.
#[derive(Debug, Clone)]
pub struct Scatterer {
    pub curve: ClosedCurve,
    pub bc: BoundaryCondition,
    pub n: usize,
}

impl Scatterer {
    pub fn new(curve: ClosedCurve, bc: BoundaryCondition, n: usize) -> Self {
        Scatterer { curve, bc, n }
    }

    pub fn grid(&self) -> Result<BoundaryGrid> {
        self.bc.grid(&self.curve, self.n)
    }

    pub fn system(&self, s: &SpectralParameter) -> Result<WeylSystem> {
        assemble_weyl(&self.bc, s, &self.grid()?)
    }
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("wavenumber must be positive, got {k}")))
    }
}

fn plane_wave_traces(k: f64, dirs: &DirectionGrid, grid: &BoundaryGrid) -> Result<Vec<Traces>> {
    dirs.directions.iter().map(|d| trace_plane_wave(k, *d, grid)).collect()
}

/// `Σ_j ω_j conj(a_j) b_j` over the selected components.
fn pair(w: &[f64], a: &Densities, b: &Traces) -> Complex64 {
    let mut acc = ZERO;
    for (j, wj) in w.iter().enumerate() {
        acc += wj * (a.phi[j].conj() * b.dirichlet[j] + a.psi[j].conj() * b.neumann[j]);
    }
    acc
}

/// Amplitude from an already factorised system on the limit branch `k`.
/// For the `Plus` branch the prefactor is conjugated as well, so that the
/// result is the conjugate transpose of the `Minus` amplitude.
pub fn amplitude_from_system(system: &WeylSystem, dirs: &DirectionGrid) -> Result<FarField> {
    let (k, branch) = match system.s {
        SpectralParameter::LimitBranch { k, branch } => (k, branch),
        SpectralParameter::OffAxis { .. } => {
            return Err(Error::InvalidParameter("scattering amplitudes need a limit-branch system".into()))
        }
    };
    let grid = system.grid();
    let traces = plane_wave_traces(k, dirs, grid)?;
    let dens = system.solve_many(&traces)?;
    let w = grid.density_weights();
    let prefactor = match branch {
        Branch::Minus => Complex64::new(0.0, 1.0 / (4.0 * PI)),
        Branch::Plus => Complex64::new(0.0, -1.0 / (4.0 * PI)),
    };
    let m = dirs.len();
    let cols: Vec<Vec<Complex64>> =
        (0..m).into_par_iter().map(|i| (0..m).map(|o| prefactor * pair(&w, &dens[i], &traces[o])).collect()).collect();
    Ok(FarField {
        k,
        bc: system.bc.clone(),
        dirs: dirs.clone(),
        amplitude: CMatrix::from_fn(m, m, |o, i| cols[i][o]),
        branch,
        convention: AmplitudeConvention::default(),
        condition: system.condition,
    })
}

/// Production path: outgoing Weyl system, one solve per incident direction.
pub fn scattering_amplitude(sc: &Scatterer, k: f64, dirs: &DirectionGrid) -> Result<FarField> {
    scattering_amplitude_branch(sc, k, dirs, Branch::Minus)
}

pub fn scattering_amplitude_branch(sc: &Scatterer, k: f64, dirs: &DirectionGrid, branch: Branch) -> Result<FarField> {
    check_k(k)?;
    let sys = sc.system(&SpectralParameter::limit(k, branch)?)?;
    amplitude_from_system(&sys, dirs)
}

/// The dual form `(i/4π) Σ ω conj(γu°_in) · (W₊⁻¹ γu°_out)`, using the
/// incoming (`Plus`) system solved for the outgoing direction. Agrees with
/// [`scattering_amplitude`] by the complex symmetry of `W`.
pub fn scattering_amplitude_dual(sc: &Scatterer, k: f64, dirs: &DirectionGrid) -> Result<FarField> {
    check_k(k)?;
    let sys = sc.system(&SpectralParameter::limit(k, Branch::Plus)?)?;
    let grid = sys.grid();
    let traces = plane_wave_traces(k, dirs, grid)?;
    let dens = sys.solve_many(&traces)?;
    let w = grid.density_weights();
    let pre = Complex64::new(0.0, 1.0 / (4.0 * PI));
    let m = dirs.len();
    let amplitude = CMatrix::from_fn(m, m, |o, i| {
        let t = &traces[i];
        let d = &dens[o];
        let mut acc = ZERO;
        for (j, wj) in w.iter().enumerate() {
            acc += wj * (t.dirichlet[j].conj() * d.phi[j] + t.neumann[j].conj() * d.psi[j]);
        }
        pre * acc
    });
    Ok(FarField {
        k,
        bc: sc.bc.clone(),
        dirs: dirs.clone(),
        amplitude,
        branch: Branch::Minus,
        convention: AmplitudeConvention::default(),
        condition: sys.condition,
    })
}

pub fn s_matrix(ff: &FarField) -> SMatrix {
    let m = ff.dirs.len();
    let matrix = CMatrix::identity(m, m) - ff.amplitude.scale(ff.dirs.weight);
    SMatrix { matrix }
}

impl SMatrix {
    /// `‖S S† − I‖₂`.
    pub fn unitarity_residual(&self) -> f64 {
        let m = self.matrix.nrows();
        let d = &self.matrix * self.matrix.adjoint() - CMatrix::identity(m, m);
        d.singular_values().iter().fold(0.0, |a: f64, b| a.max(*b))
    }
}

impl FarField {
    /// `max |s(ξ, ξ′) − s(−ξ′, −ξ)|`.
    pub fn reciprocity_residual(&self) -> Result<f64> {
        let m = self.dirs.len();
        let opp = |j| self.dirs.opposite(j).ok_or_else(|| Error::InvalidGrid("reciprocity needs an even direction count".into()));
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                worst = worst.max((self.amplitude[(a, b)] - self.amplitude[(opp(b)?, opp(a)?)]).norm());
            }
        }
        Ok(worst)
    }

    /// `max_m |2 Re s(ξ_m, ξ_m) − Σ_j (2π/M) |s(ξ_m, ξ_j)|²|`.
    pub fn optical_theorem_residual(&self) -> f64 {
        let m = self.dirs.len();
        (0..m)
            .map(|r| {
                let lhs = 2.0 * self.amplitude[(r, r)].re;
                let rhs: f64 = (0..m).map(|j| self.dirs.weight * self.amplitude[(r, j)].norm_sqr()).sum();
                (lhs - rhs).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Deviation from depending on `θ_out − θ_in` only.
    pub fn circulant_residual(&self) -> f64 {
        let m = self.dirs.len();
        let mut worst: f64 = 0.0;
        for o in 0..m {
            for i in 0..m {
                let d = (o + m - i) % m;
                worst = worst.max((self.amplitude[(o, i)] - self.amplitude[(d, 0)]).norm());
            }
        }
        worst
    }
}

/// Total cross section for incident direction `incident`:
/// `Σ_m (2π/M) |s(ξ_m, ξ_in)|²`.
pub fn cross_section(ff: &FarField, incident: usize) -> Result<f64> {
    if incident >= ff.dirs.len() {
        return Err(Error::InvalidParameter(format!("incident index {incident} out of range")));
    }
    Ok((0..ff.dirs.len()).map(|m| ff.dirs.weight * ff.amplitude[(m, incident)].norm_sqr()).sum())
}

/// Samples of the generalized eigenfunction `u⁺ = u° + SLφ + DLψ`.
#[derive(Debug, Clone)]
pub struct EigenfunctionField {
    pub k: f64,
    pub incident: Point,
    pub points: Vec<Point>,
    pub values: Vec<Complex64>,
    /// Points inside the exclusion band around the curve; their values are NaN.
    pub masked: Vec<bool>,
    pub densities: Densities,
    pub condition: f64,
}

pub fn plane_wave(k: f64, incident: Point, x: Point) -> Complex64 {
    Complex64::from_polar(1.0, k * (incident[0] * x[0] + incident[1] * x[1]))
}

pub fn generalized_eigenfunction(sc: &Scatterer, k: f64, incident: Point, points: &[Point]) -> Result<EigenfunctionField> {
    check_k(k)?;
    let sys = sc.system(&SpectralParameter::limit(k, Branch::Minus)?)?;
    eigenfunction_from_system(&sys, incident, points)
}

pub fn eigenfunction_from_system(sys: &WeylSystem, incident: Point, points: &[Point]) -> Result<EigenfunctionField> {
    let k = match sys.s {
        SpectralParameter::LimitBranch { k, branch: Branch::Minus } => k,
        _ => return Err(Error::InvalidParameter("eigenfunctions use the outgoing limit system".into())),
    };
    let grid = sys.grid();
    let traces = trace_plane_wave(k, incident, grid)?;
    let dens = sys.solve_many(std::slice::from_ref(&traces))?.remove(0);
    let masked: Vec<bool> = points.iter().map(|p| in_exclusion_band(grid, *p)).collect();
    // masked points are never evaluated; they may sit exactly on a node
    let kept: Vec<Point> = points.iter().zip(&masked).filter(|(_, m)| !**m).map(|(p, _)| *p).collect();
    let mut scattered = eval_potential(&sys.s, grid, &dens.phi, &dens.psi, &kept)?.into_iter();
    let values = points
        .iter()
        .zip(&masked)
        .map(|(x, m)| match m {
            true => Complex64::new(f64::NAN, f64::NAN),
            false => plane_wave(k, incident, *x) + scattered.next().expect("one value per kept point"),
        })
        .collect();
    Ok(EigenfunctionField { k, incident, points: points.to_vec(), values, masked, densities: dens, condition: sys.condition })
}

/// Far-field pattern of the scattered part of `u⁺` for one incident direction.
pub fn scattered_pattern(sys: &WeylSystem, k: f64, incident: Point, directions: &[Point]) -> Result<Vec<Complex64>> {
    let traces = trace_plane_wave(k, incident, sys.grid())?;
    let dens = sys.solve_many(std::slice::from_ref(&traces))?.remove(0);
    far_field_row(k, sys.grid(), &dens.phi, &dens.psi, directions)
}

/// Leading-order scattered wave `c(k) e^{ik|x|} |x|^{−1/2} F(x̂)`.
pub fn far_zone_value(k: f64, pattern: Complex64, x: Point) -> Complex64 {
    let r = x[0].hypot(x[1]);
    far_field_constant(k) * Complex64::from_polar(1.0, k * r) * pattern / r.sqrt()
}

/// Perturbed resolvent kernel: `𝒢_z(|x − y₀|)` plus the Kreĭn correction
/// `SLφ + DLψ` whose densities solve the Weyl system with the traces of the
/// point source at `y₀`.
pub fn resolvent_kernel(sc: &Scatterer, s: &SpectralParameter, x: Point, y0: Point) -> Result<Complex64> {
    let sys = sc.system(s)?;
    resolvent_kernel_from_system(&sys, x, y0)
}

pub fn resolvent_kernel_from_system(sys: &WeylSystem, x: Point, y0: Point) -> Result<Complex64> {
    let r0 = (x[0] - y0[0]).hypot(x[1] - y0[1]);
    if r0 == 0.0 {
        return Err(Error::Domain("resolvent kernel needs x != y0".into()));
    }
    let grid = sys.grid();
    let s = sys.s;
    let mut dirichlet = Vec::with_capacity(grid.len());
    let mut neumann = Vec::with_capacity(grid.len());
    for (p, nu) in grid.points.iter().zip(&grid.normals) {
        let d = [p[0] - y0[0], p[1] - y0[1]];
        let r = d[0].hypot(d[1]);
        if r == 0.0 {
            return Err(Error::Domain("source point lies on a boundary node".into()));
        }
        let kp = kernel_parts(&s, r);
        dirichlet.push(kp.g);
        neumann.push(kp.dg * (d[0] * nu[0] + d[1] * nu[1]) / r);
    }
    let dens = sys.solve_many(&[Traces { dirichlet, neumann }])?.remove(0);
    let corr = eval_potential(&s, grid, &dens.phi, &dens.psi, &[x])?[0];
    Ok(kernel_parts(&s, r0).g + corr)
}
