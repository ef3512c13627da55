//! Independent ground truth: Fourier symbols of the layer operators on a
//! circle, partial-wave scattering coefficients, and a brute-force
//! collocation assembly of the Weyl system on small closed grids.
//!
//! Nothing here uses the Nyström machinery of `layerops`; kernels are
//! re-integrated with adaptive Gauss–Kronrod quadrature.

use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, GridKind};
use crate::scattering::{AmplitudeConvention, DirectionGrid, FarField};
use crate::specfun::{bessel_j_with_derivative, hankel1_with_derivative, kernel_parts, Branch, SpectralParameter};
use crate::weyl::{BoundaryCondition, Condition, Support};
use crate::CMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Diagonal symbols of `V, K, K', T` on the circle of radius `R`, outgoing
/// branch. `K` and `K'` are the averages of the one-sided traces.
#[derive(Debug, Clone)]
pub struct CircleSymbols {
    pub k: f64,
    pub radius: f64,
    pub n_max: usize,
    v: Vec<Complex64>,
    kdl: Vec<Complex64>,
    ksl: Vec<Complex64>,
    t: Vec<Complex64>,
}

impl CircleSymbols {
    fn idx(&self, n: i32) -> usize {
        assert!(n.unsigned_abs() as usize <= self.n_max, "mode {n} beyond n_max");
        n.unsigned_abs() as usize
    }

    /// `σ_n(γ₀SL) = (iπR/2) J_n H_n`.
    pub fn v(&self, n: i32) -> Complex64 {
        self.v[self.idx(n)]
    }

    /// `σ_n(γ₀DL)`, average of the two sides.
    pub fn k_dl(&self, n: i32) -> Complex64 {
        self.kdl[self.idx(n)]
    }

    /// `σ_n(γ₁SL)`, average of the two sides.
    pub fn k_sl(&self, n: i32) -> Complex64 {
        self.ksl[self.idx(n)]
    }

    /// `σ_n(γ₁DL)`.
    pub fn t(&self, n: i32) -> Complex64 {
        self.t[self.idx(n)]
    }

    /// One-sided trace of `γ₀DL` (`exterior = true` for Ω₊), computed
    /// directly from the mode expansion on that side.
    pub fn dl_dirichlet_trace(&self, n: i32, exterior: bool) -> Complex64 {
        let (j, jp, h, hp) = self.bessel(n);
        let c = I * PI * self.k * self.radius / 2.0;
        if exterior {
            c * h * jp
        } else {
            c * j * hp
        }
    }

    /// One-sided trace of `γ₁SL`, directly from the mode expansion.
    pub fn sl_neumann_trace(&self, n: i32, exterior: bool) -> Complex64 {
        let (j, jp, h, hp) = self.bessel(n);
        let c = I * PI * self.k * self.radius / 2.0;
        if exterior {
            c * hp * j
        } else {
            c * jp * h
        }
    }

    fn bessel(&self, n: i32) -> (Complex64, Complex64, Complex64, Complex64) {
        let m = n.unsigned_abs() as usize;
        let x = self.k * self.radius;
        let (j, jd) = bessel_j_with_derivative(m, x).expect("positive argument");
        let (h, hd) = hankel1_with_derivative(m, x).expect("positive argument");
        (j[m].into(), jd[m].into(), h[m], hd[m])
    }
}

pub fn circle_symbols(k: f64, radius: f64, n_max: usize) -> Result<CircleSymbols> {
    if !(k > 0.0 && radius > 0.0 && n_max >= 1) {
        return Err(Error::InvalidParameter(format!("circle symbols need k > 0, R > 0, n_max >= 1 (got {k}, {radius}, {n_max})")));
    }
    let x = k * radius;
    let (j, jd) = bessel_j_with_derivative(n_max, x)?;
    let (h, hd) = hankel1_with_derivative(n_max, x)?;
    let mut s = CircleSymbols { k, radius, n_max, v: vec![], kdl: vec![], ksl: vec![], t: vec![] };
    for n in 0..=n_max {
        let (j, jp, h, hp) = (Complex64::from(j[n]), Complex64::from(jd[n]), h[n], hd[n]);
        s.v.push(I * PI * radius / 2.0 * j * h);
        let avg = I * PI * x / 4.0 * (j * hp + jp * h);
        s.kdl.push(avg);
        s.ksl.push(avg);
        s.t.push(I * PI * k * x / 2.0 * jp * hp);
    }
    Ok(s)
}

fn constant(c: &crate::weyl::Coupling, what: &str) -> Result<f64> {
    c.as_constant().ok_or_else(|| Error::InvalidParameter(format!("partial-wave oracle needs a constant {what}")))
}

/// Partial-wave coefficient `c_n` of the scattered field
/// `u_s = Σ c_n i^n H_n(kr) e^{in(θ-θ_in)}` for a plane wave hitting the
/// circle of radius `R`, obtained by mode matching of the boundary
/// conditions:
///
/// * Dirichlet `γ₀u = 0`, Neumann `γ₁u = 0`;
/// * Robin: `γ₁⁺u = b₊γ₀⁺u` outside (the inside decouples);
/// * δ: `γ₀u` continuous and `α γ₀u = [γ₁]u`;
/// * δ′: `γ₁u` continuous and `β γ₁u = [γ₀]u`.
pub fn mode_coefficient(cond: &Condition, k: f64, radius: f64, n: i32) -> Result<Complex64> {
    let m = n.unsigned_abs() as usize;
    let x = k * radius;
    let (jv, jd) = bessel_j_with_derivative(m, x)?;
    let (hv, hd) = hankel1_with_derivative(m, x)?;
    let j = Complex64::from(jv[m]);
    let jp = Complex64::from(k * jd[m]);
    let (h, hp) = (hv[m], k * hd[m]);
    let solve2 = |a11: Complex64, a12: Complex64, b1: Complex64, a21: Complex64, a22: Complex64, b2: Complex64| {
        // returns the second unknown (c) of [[a11,a12],[a21,a22]] (a, c) = (b1, b2)
        (a11 * b2 - a21 * b1) / (a11 * a22 - a12 * a21)
    };
    Ok(match cond {
        Condition::Dirichlet => -j / h,
        Condition::Neumann => -jp / hp,
        Condition::Robin { b_plus, .. } => {
            let bp = constant(b_plus, "b_plus")?;
            -(jp - bp * j) / (hp - bp * h)
        }
        Condition::Delta { alpha } => {
            let a = constant(alpha, "alpha")?;
            // a j - c h = j ;  -a j' + c (h' - α h) = α j - j'
            solve2(j, -h, j, -jp, hp - a * h, a * j - jp)
        }
        Condition::DeltaPrime { beta } => {
            let b = constant(beta, "beta")?;
            // a j' - c h' = j' ;  -a j + c (h - β h') = β j' - j
            solve2(jp, -hp, jp, -j, h - b * hp, b * jp - j)
        }
    })
}

/// Number of modes kept by the partial-wave oracle.
pub fn mie_modes(k: f64, radius: f64) -> usize {
    32usize.max((2.0 * k * radius).ceil() as usize + 16)
}

/// Amplitude samples of the partial-wave solution on a circle, in the same
/// normalisation as [`crate::scattering::scattering_amplitude`]:
/// `s(out, in) = −(1/π) Σ_n conj(c_n) e^{−in(θ_out − θ_in)}`.
pub fn mie_farfield(bc: &BoundaryCondition, k: f64, radius: f64, dirs: &DirectionGrid) -> Result<FarField> {
    if !matches!(bc.support, Support::FullCurve) {
        return Err(Error::InvalidParameter("the partial-wave oracle covers the full circle only".into()));
    }
    bc.validate_constants()?;
    let n_max = mie_modes(k, radius) as i32;
    let coeffs: Vec<Complex64> = (-n_max..=n_max).map(|n| mode_coefficient(&bc.condition, k, radius, n)).collect::<Result<_>>()?;
    let tail = coeffs[0].norm().max(coeffs[coeffs.len() - 1].norm());
    if tail > 1e-12 {
        return Err(Error::InvalidParameter(format!("partial-wave series not converged: tail coefficient {tail:.2e}")));
    }
    let m = dirs.len();
    let amplitude = CMatrix::from_fn(m, m, |o, i| {
        let delta = dirs.angles[o] - dirs.angles[i];
        let sum: Complex64 = (-n_max..=n_max).zip(&coeffs).map(|(n, c)| c.conj() * Complex64::from_polar(1.0, -(n as f64) * delta)).sum();
        -sum / PI
    });
    Ok(FarField {
        k,
        bc: bc.clone(),
        dirs: dirs.clone(),
        amplitude,
        branch: Branch::Minus,
        convention: AmplitudeConvention::default(),
        condition: 1.0,
    })
}

/// The amplitude computed from the circle symbols of the Weyl system rather
/// than from mode matching, in either of the two equivalent pairings:
/// `dual = false` pairs the outgoing-system densities with the plane-wave
/// traces, `dual = true` pairs plane-wave traces with incoming-system
/// densities. Agreement with [`mie_farfield`] ties the Weyl-matrix sign
/// conventions to the boundary conditions.
pub fn symbol_amplitude(bc: &BoundaryCondition, k: f64, radius: f64, dirs: &DirectionGrid, dual: bool) -> Result<FarField> {
    if !matches!(bc.support, Support::FullCurve) {
        return Err(Error::InvalidParameter("symbol amplitudes cover the full circle only".into()));
    }
    bc.validate_constants()?;
    let n_max = mie_modes(k, radius);
    let sym = circle_symbols(k, radius, n_max)?;
    let (jv, jd) = bessel_j_with_derivative(n_max, k * radius)?;
    let c = |x: &crate::weyl::Coupling| x.as_constant().unwrap_or(0.0);
    // per-mode solve of W x = (g, h); `conj_w` selects the incoming branch
    let solve = |n: i32, g: Complex64, h: Complex64, conj_w: bool| -> (Complex64, Complex64) {
        let f = |z: Complex64| if conj_w { z.conj() } else { z };
        let (v, kd, ka, t) = (f(sym.v(n)), f(sym.k_dl(n)), f(sym.k_sl(n)), f(sym.t(n)));
        match &bc.condition {
            Condition::Dirichlet => (-g / v, Complex64::new(0.0, 0.0)),
            Condition::Neumann => (Complex64::new(0.0, 0.0), -h / t),
            Condition::Delta { alpha } => {
                let a = c(alpha);
                (-a * g / (1.0 + a * v), Complex64::new(0.0, 0.0))
            }
            Condition::DeltaPrime { beta } => {
                let b = c(beta);
                (Complex64::new(0.0, 0.0), b * h / (1.0 - b * t))
            }
            Condition::Robin { b_minus, b_plus } => {
                let (bm, bp) = (c(b_minus), c(b_plus));
                let (jump, mean) = (bp - bm, 0.5 * (bp + bm));
                let (a11, a12) = (-(1.0 / jump + v), -(mean / jump + kd));
                let (a21, a22) = (-(mean / jump + ka), -(bp * bm / jump + t));
                let det = a11 * a22 - a12 * a21;
                ((a22 * g - a12 * h) / det, (a11 * h - a21 * g) / det)
            }
        }
    };
    let pre = I / (4.0 * PI) * 2.0 * PI * radius;
    let mut weights = Vec::new();
    for n in -(n_max as i32)..=(n_max as i32) {
        let m = n.unsigned_abs() as usize;
        let ipow = I.powi(n);
        let g = ipow * jv[m];
        let h = ipow * k * jd[m];
        let value = if dual {
            let (x, y) = solve(n, g, h, true);
            g.conj() * x + h.conj() * y
        } else {
            let (x, y) = solve(n, g, h, false);
            x.conj() * g + y.conj() * h
        };
        weights.push((n, pre * value));
    }
    let m = dirs.len();
    let amplitude = CMatrix::from_fn(m, m, |o, i| {
        let delta = dirs.angles[o] - dirs.angles[i];
        weights.iter().map(|(n, w)| w * Complex64::from_polar(1.0, -(*n as f64) * delta)).sum()
    });
    Ok(FarField {
        k,
        bc: bc.clone(),
        dirs: dirs.clone(),
        amplitude,
        branch: Branch::Minus,
        convention: AmplitudeConvention::default(),
        condition: 1.0,
    })
}

// ---------------------------------------------------------------------------
// brute-force collocation

/// Adaptive Gauss–Kronrod (7/15) integration of a vector-valued integrand.
fn gk15<F: Fn(f64, &mut [Complex64])>(f: &F, a: f64, b: f64, dim: usize, tol: f64, out: &mut [Complex64]) {
    const XK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_2,
        0.140_653_259_715_525_9,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_727_8,
    ];
    const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];
    let mut stack = vec![(a, b, 0u32)];
    let mut val = vec![Complex64::new(0.0, 0.0); dim];
    let mut kron = vec![Complex64::new(0.0, 0.0); dim];
    let mut gauss = vec![Complex64::new(0.0, 0.0); dim];
    while let Some((lo, hi, depth)) = stack.pop() {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        kron.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        gauss.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (i, &x) in XK.iter().enumerate() {
            let pts: &[f64] = if i == 7 { &[0.0] } else { &[-1.0, 1.0] };
            for &sgn in pts {
                f(c + sgn * h * x, &mut val);
                for d in 0..dim {
                    kron[d] += WK[i] * val[d];
                    if i % 2 == 1 {
                        gauss[d] += WG[i / 2] * val[d];
                    }
                }
            }
        }
        let err = kron.iter().zip(&gauss).map(|(k, g)| (k - g).norm()).fold(0.0, f64::max) * h;
        // The absolute floor stops bisection once a panel's error is at the
        // roundoff level; near the log singularity err/width never shrinks.
        if err <= tol * (hi - lo) || err <= 1e-16 * (b - a) || depth > 60 {
            for d in 0..dim {
                out[d] += kron[d] * h;
            }
        } else {
            stack.push((lo, c, depth + 1));
            stack.push((c, hi, depth + 1));
        }
    }
}

/// Trigonometric Lagrange basis on `n` (even) equispaced nodes, and its
/// derivative, evaluated at offset `u = τ − t_j`.
fn lagrange(n: usize, u: f64) -> (f64, f64) {
    let half = n / 2;
    let mut v = 1.0;
    let mut d = 0.0;
    for m in 1..half {
        let mf = m as f64;
        v += 2.0 * (mf * u).cos();
        d -= 2.0 * mf * (mf * u).sin();
    }
    let hf = half as f64;
    v += (hf * u).cos();
    d -= hf * (hf * u).sin();
    (v / n as f64, d / n as f64)
}

/// Layer operators obtained by integrating the kernels against the
/// trigonometric interpolation basis with adaptive quadrature.
#[derive(Debug, Clone)]
pub struct BruteForceOperators {
    pub v: CMatrix,
    pub k_dl: CMatrix,
    pub k_sl: CMatrix,
    pub t: CMatrix,
}

pub fn brute_force_operators(s: &SpectralParameter, grid: &BoundaryGrid) -> Result<BruteForceOperators> {
    s.validate()?;
    if grid.kind != GridKind::Closed || grid.len() > 32 {
        return Err(Error::InvalidGrid("brute-force oracle needs a closed grid with N <= 32".into()));
    }
    let n = grid.len();
    let curve = &grid.curve;
    let kappa2 = -s.z();
    let tol = 1e-13;
    let mut v = CMatrix::zeros(n, n);
    let mut kd = CMatrix::zeros(n, n);
    let mut ks = CMatrix::zeros(n, n);
    let mut t = CMatrix::zeros(n, n);

    // Integrals over τ ∈ (t_obs − π, t_obs + π), split at the singularity.
    let integrate = |t_obs: f64, f: &dyn Fn(f64, &mut [Complex64]), dim: usize| {
        let mut acc = vec![Complex64::new(0.0, 0.0); dim];
        let g = |tau: f64, out: &mut [Complex64]| f(tau, out);
        gk15(&g, t_obs - PI, t_obs, dim, tol, &mut acc);
        gk15(&g, t_obs, t_obs + PI, dim, tol, &mut acc);
        acc
    };

    for i in 0..n {
        let ti = grid.params[i];
        let nui = grid.normals[i];
        // rows of V, K, K' and the κ² ν·ν part of T at once
        let row = integrate(
            ti,
            &|tau: f64, out: &mut [Complex64]| {
                let dy = curve.derivative(tau);
                let sp = dy[0].hypot(dy[1]);
                let nu = [dy[1] / sp, -dy[0] / sp];
                let c = curve.chord(ti, tau);
                let d = [-c[0], -c[1]];
                let r = d[0].hypot(d[1]);
                let (g, dg) = if r == 0.0 {
                    (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
                } else {
                    let p = kernel_parts(s, r);
                    (p.g, p.dg)
                };
                let dnu_y = if r == 0.0 { Complex64::new(0.0, 0.0) } else { -dg * (d[0] * nu[0] + d[1] * nu[1]) / r };
                let dnu_x = if r == 0.0 { Complex64::new(0.0, 0.0) } else { dg * (d[0] * nui[0] + d[1] * nui[1]) / r };
                let nn = nui[0] * nu[0] + nui[1] * nu[1];
                for j in 0..n {
                    let (l, _) = lagrange(n, tau - grid.params[j]);
                    out[j] = g * l * sp;
                    out[n + j] = dnu_y * l * sp;
                    out[2 * n + j] = dnu_x * l * sp;
                    out[3 * n + j] = kappa2 * nn * g * l * sp;
                }
            },
            4 * n,
        );
        for j in 0..n {
            v[(i, j)] = row[j];
            kd[(i, j)] = row[n + j];
            ks[(i, j)] = row[2 * n + j];
            t[(i, j)] = row[3 * n + j];
        }
        // tangential part of Maue's formula: d/dσ_x ∫ 𝒢 (dℓ_j/dτ) dτ,
        // with the outer derivative by a 5-point difference in t.
        let step = 1e-4;
        let mut deriv = vec![Complex64::new(0.0, 0.0); n];
        for (c, off) in [(1.0, -2.0), (-8.0, -1.0), (8.0, 1.0), (-1.0, 2.0)] {
            let to = ti + off * step;
            let vals = integrate(
                to,
                &|tau: f64, out: &mut [Complex64]| {
                    let c = curve.chord(to, tau);
                    let r = c[0].hypot(c[1]);
                    let g = if r == 0.0 { Complex64::new(0.0, 0.0) } else { kernel_parts(s, r).g };
                    for (o, tj) in out.iter_mut().zip(&grid.params) {
                        let (_, dl) = lagrange(n, tau - tj);
                        *o = g * dl;
                    }
                },
                n,
            );
            for j in 0..n {
                deriv[j] += c * vals[j];
            }
        }
        for j in 0..n {
            t[(i, j)] += deriv[j] / (12.0 * step * grid.jacobians[i]);
        }
    }
    Ok(BruteForceOperators { v, k_dl: kd, k_sl: ks, t })
}

/// Brute-force Weyl matrix `W` (unscaled) for a constant-coefficient
/// condition on a small closed grid, plus the solved densities for `rhs`.
#[derive(Debug, Clone)]
pub struct BruteForceWeyl {
    pub matrix: CMatrix,
    pub phi: Vec<Complex64>,
    pub psi: Vec<Complex64>,
}

/// Re-assembles `Θ + ΠMΠ′` from [`brute_force_operators`] and solves it for
/// the given Dirichlet/Neumann traces `(g, h)`.
pub fn brute_force_weyl(
    bc: &BoundaryCondition,
    s: &SpectralParameter,
    grid: &BoundaryGrid,
    g: &[Complex64],
    h: &[Complex64],
) -> Result<BruteForceWeyl> {
    bc.validate_constants()?;
    let ops = brute_force_operators(s, grid)?;
    let n = grid.len();
    let eye = CMatrix::identity(n, n);
    let zero = vec![Complex64::new(0.0, 0.0); n];
    let solve = |m: &CMatrix, rhs: Vec<Complex64>| -> Result<Vec<Complex64>> {
        let b = nalgebra::DVector::from_vec(rhs);
        m.clone()
            .lu()
            .solve(&b)
            .map(|x| x.iter().copied().collect())
            .ok_or(Error::Singular { condition: f64::INFINITY, detail: "brute-force system".into() })
    };
    let c = |x: &crate::weyl::Coupling| x.as_constant().unwrap_or(0.0);
    Ok(match &bc.condition {
        Condition::Dirichlet => {
            let w = -ops.v.clone();
            let phi = solve(&w, g.to_vec())?;
            BruteForceWeyl { matrix: w, phi, psi: zero }
        }
        Condition::Neumann => {
            let w = -ops.t.clone();
            let psi = solve(&w, h.to_vec())?;
            BruteForceWeyl { matrix: w, phi: zero, psi }
        }
        Condition::Delta { alpha } => {
            let a = c(alpha);
            let w = -(eye.map(|x| x / a) + &ops.v);
            let phi = solve(&w, g.to_vec())?;
            BruteForceWeyl { matrix: w, phi, psi: zero }
        }
        Condition::DeltaPrime { beta } => {
            let b = c(beta);
            let w = eye.map(|x| x / b) - &ops.t;
            let psi = solve(&w, h.to_vec())?;
            BruteForceWeyl { matrix: w, phi: zero, psi }
        }
        Condition::Robin { b_minus, b_plus } => {
            let (bm, bp) = (c(b_minus), c(b_plus));
            let jump = bp - bm;
            let mean = 0.5 * (bp + bm);
            let mut w = CMatrix::zeros(2 * n, 2 * n);
            w.view_mut((0, 0), (n, n)).copy_from(&(-(eye.map(|x| x / jump) + &ops.v)));
            w.view_mut((0, n), (n, n)).copy_from(&(-(eye.map(|x| x * (mean / jump)) + &ops.k_dl)));
            w.view_mut((n, 0), (n, n)).copy_from(&(-(eye.map(|x| x * (mean / jump)) + &ops.k_sl)));
            w.view_mut((n, n), (n, n)).copy_from(&(-(eye.map(|x| x * (bp * bm / jump)) + &ops.t)));
            let mut rhs = g.to_vec();
            rhs.extend_from_slice(h);
            let x = solve(&w, rhs)?;
            BruteForceWeyl { matrix: w, phi: x[..n].to_vec(), psi: x[n..].to_vec() }
        }
    })
}
