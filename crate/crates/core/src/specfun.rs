//! Bessel functions and the 2D Helmholtz / modified-Helmholtz fundamental
//! solutions.
//!
//! `J_n` comes from Miller's downward recurrence normalised by
//! `J_0 + 2 Σ J_2k = 1`; `Y_0`, `Y_1` from Neumann's expansions in those same
//! `J`s, and higher `Y_n` by the (stable) upward recurrence. `K_0`, `K_1`
//! use the ascending series for `|w| <= 2` and Steed's continued fraction
//! beyond: the series cancels badly along the positive real axis (about
//! 1e-10 relative at `w = 7`), while the continued fraction holds ~1e-15
//! everywhere past `|w| = 2`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Radius of the series / continued-fraction switch for `K_0`, `K_1`.
pub const K_SWITCH_RADIUS: f64 = 2.0;

/// Above this argument the kernel fast path uses Hankel's expansions.
const ASYMPTOTIC_X: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Incoming limit: complex conjugate of the outgoing kernel.
    Plus,
    /// Outgoing limit `(i/4) H_0^(1)(kr)`.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralParameter {
    OffAxis { z: Complex64 },
    LimitBranch { k: f64, branch: Branch },
}

impl SpectralParameter {
    pub fn off_axis(z: Complex64) -> Result<Self> {
        let s = SpectralParameter::OffAxis { z };
        s.validate()?;
        Ok(s)
    }

    pub fn limit(k: f64, branch: Branch) -> Result<Self> {
        let s = SpectralParameter::LimitBranch { k, branch };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SpectralParameter::OffAxis { z } => {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::Domain(format!("non-finite spectral parameter {z}")));
                }
                if z.im == 0.0 && z.re <= 0.0 {
                    return Err(Error::Domain(format!("spectral parameter {z} lies on the cut (-inf, 0]")));
                }
                Ok(())
            }
            SpectralParameter::LimitBranch { k, .. } => {
                if !(k.is_finite() && k > 0.0) {
                    return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
                }
                Ok(())
            }
        }
    }

    /// The spectral parameter `z` of `(Δ - z)`; `-k²` on a limit branch.
    pub fn z(&self) -> Complex64 {
        match *self {
            SpectralParameter::OffAxis { z } => z,
            SpectralParameter::LimitBranch { k, .. } => Complex64::new(-k * k, 0.0),
        }
    }

    /// Principal root `√z` with positive real part (off-axis only).
    pub fn sqrt_z(&self) -> Option<Complex64> {
        match *self {
            SpectralParameter::OffAxis { z } => Some(z.sqrt()),
            SpectralParameter::LimitBranch { .. } => None,
        }
    }

    /// The same parameter with the opposite limit branch; off-axis values
    /// map to their complex conjugate.
    pub fn conjugate(&self) -> Self {
        match *self {
            SpectralParameter::OffAxis { z } => SpectralParameter::OffAxis { z: z.conj() },
            SpectralParameter::LimitBranch { k, branch } => SpectralParameter::LimitBranch {
                k,
                branch: match branch {
                    Branch::Plus => Branch::Minus,
                    Branch::Minus => Branch::Plus,
                },
            },
        }
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Bessel argument must be positive, got {x}")))
    }
}

fn parity(n: i32) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `J_0 .. J_nmax` at `x > 0` by Miller's algorithm.
pub fn bessel_j_all(nmax: usize, x: f64) -> Vec<f64> {
    const BIG: f64 = 1e250;
    let top = nmax.max(x.ceil() as usize);
    let mut start = top + 30 + (15.0 * x.cbrt()).ceil() as usize;
    start += start % 2;
    let mut out = vec![0.0; nmax + 1];
    let (mut above, mut cur) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    for m in (1..=start).rev() {
        // cur = J_m, above = J_{m+1} (unnormalised)
        let below = 2.0 * m as f64 / x * cur - above;
        above = cur;
        cur = below;
        if m - 1 <= nmax {
            out[m - 1] = cur;
        }
        if (m - 1) % 2 == 0 && m > 1 {
            norm += 2.0 * cur;
        }
        if cur.abs() > BIG {
            cur /= BIG;
            above /= BIG;
            norm /= BIG;
            for v in out.iter_mut() {
                *v /= BIG;
            }
        }
    }
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// `Y_0, Y_1` from Neumann's expansions, given `J_0 .. J_m` with `m` past
/// the point where the `J`s have decayed to roundoff.
fn y01_from_j(x: f64, j: &[f64]) -> (f64, f64) {
    let lg = (x / 2.0).ln();
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k + 1 < j.len() {
        let sign = parity(k as i32);
        let kf = k as f64;
        s0 += sign * j[2 * k] / kf;
        s1 += sign * (2.0 * kf + 1.0) * j[2 * k + 1] / (kf * (kf + 1.0));
        k += 1;
    }
    let y0 = 2.0 / PI * ((lg + EULER_GAMMA) * j[0] - 2.0 * s0);
    let y1 = -2.0 / (PI * x) * j[0] + 2.0 / PI * (lg - 1.0 + EULER_GAMMA) * j[1] - 2.0 / PI * s1;
    (y0, y1)
}

fn neumann_len(x: f64) -> usize {
    x.ceil() as usize + 40 + (20.0 * x.cbrt()).ceil() as usize
}

pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    check_x(x)?;
    let m = n.unsigned_abs() as usize;
    let v = bessel_j_all(m, x)[m];
    Ok(if n < 0 { parity(n) * v } else { v })
}

/// `Y_0 .. Y_nmax` at `x > 0`.
pub fn bessel_y_all(nmax: usize, x: f64) -> Vec<f64> {
    let j = bessel_j_all(neumann_len(x), x);
    let (y0, y1) = y01_from_j(x, &j);
    let mut out = vec![y0];
    if nmax >= 1 {
        out.push(y1);
    }
    for m in 1..nmax {
        let next = 2.0 * m as f64 / x * out[m] - out[m - 1];
        out.push(next);
    }
    out
}

pub fn bessel_y(n: i32, x: f64) -> Result<f64> {
    check_x(x)?;
    let m = n.unsigned_abs() as usize;
    let v = bessel_y_all(m, x)[m];
    Ok(if n < 0 { parity(n) * v } else { v })
}

pub fn hankel1(n: i32, x: f64) -> Result<Complex64> {
    Ok(Complex64::new(bessel_j(n, x)?, bessel_y(n, x)?))
}

/// `J_n` and `J_n'` for `n = 0..=nmax` (derivatives with respect to `x`).
pub fn bessel_j_with_derivative(nmax: usize, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_x(x)?;
    let j = bessel_j_all(nmax + 1, x);
    let d = (0..=nmax).map(|n| if n == 0 { -j[1] } else { 0.5 * (j[n - 1] - j[n + 1]) }).collect();
    Ok((j[..=nmax].to_vec(), d))
}

/// `H_n^(1)` and its derivative for `n = 0..=nmax`.
pub fn hankel1_with_derivative(nmax: usize, x: f64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_x(x)?;
    let j = bessel_j_all(nmax + 1, x);
    let y = bessel_y_all(nmax + 1, x);
    let h: Vec<Complex64> = j.iter().zip(&y).map(|(&a, &b)| Complex64::new(a, b)).collect();
    let d = (0..=nmax).map(|n| if n == 0 { -h[1] } else { 0.5 * (h[n - 1] - h[n + 1]) }).collect();
    Ok((h[..=nmax].to_vec(), d))
}

/// Hankel's expansions for `J_0, J_1, Y_0, Y_1` at large `x`.
fn jy01_asymptotic(x: f64) -> [f64; 4] {
    let mut res = [0.0; 4];
    for nu in 0..2 {
        let mu = 4.0 * (nu * nu) as f64;
        let (mut p, mut q) = (0.0, 0.0);
        let mut term = 1.0;
        for k in 0..40 {
            if k % 2 == 0 {
                p += parity(k / 2) * term;
            } else {
                q += parity(k / 2) * term;
            }
            let kf = (k + 1) as f64;
            let next = term * (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
            if next.abs() > term.abs() || next.abs() < 1e-18 {
                break;
            }
            term = next;
        }
        let chi = x - (nu as f64 / 2.0 + 0.25) * PI;
        let amp = (2.0 / (PI * x)).sqrt();
        let (s, c) = chi.sin_cos();
        res[nu as usize] = amp * (p * c - q * s);
        res[2 + nu as usize] = amp * (p * s + q * c);
    }
    res
}

/// `[J_0, J_1, Y_0, Y_1]` at `x > 0`; the fast path used by kernel assembly.
pub fn bessel_jy01(x: f64) -> [f64; 4] {
    if x >= ASYMPTOTIC_X {
        return jy01_asymptotic(x);
    }
    let j = bessel_j_all(neumann_len(x), x);
    let (y0, y1) = y01_from_j(x, &j);
    [j[0], j[1], y0, y1]
}

/// `I_0(w), I_1(w)` by the ascending series (entire functions).
pub fn mod_bessel_i01(w: Complex64) -> (Complex64, Complex64) {
    let q = w * w / 4.0;
    let mut t0 = Complex64::new(1.0, 0.0);
    let mut t1 = w / 2.0;
    let (mut i0, mut i1) = (t0, t1);
    for m in 1..200 {
        let mf = m as f64;
        t0 = t0 * q / (mf * mf);
        t1 = t1 * q / (mf * (mf + 1.0));
        i0 += t0;
        i1 += t1;
        if t0.norm() < 1e-17 * i0.norm() && t1.norm() < 1e-17 * i1.norm().max(1e-300) {
            break;
        }
    }
    (i0, i1)
}

fn k01_series(w: Complex64) -> (Complex64, Complex64) {
    let q = w * w / 4.0;
    let lg = (w / 2.0).ln();
    let (i0, i1) = mod_bessel_i01(w);
    // K_0 = -(ln(w/2) + γ) I_0 + Σ H_m q^m / (m!)²
    // K_1 = 1/w + ln(w/2) I_1 - (w/4) Σ [ψ(m+1) + ψ(m+2)] q^m / (m!(m+1)!)
    let mut t = Complex64::new(1.0, 0.0);
    let mut h = 0.0;
    let mut s0 = Complex64::new(0.0, 0.0);
    let mut s1 = Complex64::new(1.0 - 2.0 * EULER_GAMMA, 0.0);
    for m in 1..200 {
        let mf = m as f64;
        h += 1.0 / mf;
        t = t * q / (mf * mf);
        s0 += t * h;
        let psi_sum = 2.0 * h + 1.0 / (mf + 1.0) - 2.0 * EULER_GAMMA;
        let u = t / (mf + 1.0) * psi_sum;
        s1 += u;
        if t.norm() * (h + 1.0) < 1e-18 * s0.norm().max(1e-300) && u.norm() < 1e-18 * s1.norm() {
            break;
        }
    }
    let k0 = -(lg + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / w + lg * i1 - w / 4.0 * s1;
    (k0, k1)
}

/// Steed's continued fraction (CF2) for `K_0`, `K_1`; accurate for
/// `|w| >= 2` with `Re w > 0`.
fn k01_steed(w: Complex64) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let mut b = 2.0 * (one + w);
    let mut d = one / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25;
    let mut q = Complex64::new(a1, 0.0);
    let mut c = Complex64::new(a1, 0.0);
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 1..100_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = one / (b + a * d);
        delh = (b * d - one) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-17 * s.norm() {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * w)).sqrt() * (-w).exp() / s;
    let k1 = k0 * (w + 0.5 - h) / w;
    (k0, k1)
}

/// `K_0(w), K_1(w)` for `Re w > 0` without validation.
pub fn mod_bessel_k01(w: Complex64) -> (Complex64, Complex64) {
    if w.norm() <= K_SWITCH_RADIUS {
        k01_series(w)
    } else {
        k01_steed(w)
    }
}

pub fn mod_bessel_k(order: u32, w: Complex64) -> Result<Complex64> {
    if !(w.re.is_finite() && w.im.is_finite()) || w.re <= 0.0 {
        return Err(Error::Domain(format!("K requires Re(w) > 0, got {w}")));
    }
    let (k0, k1) = mod_bessel_k01(w);
    match order {
        0 => Ok(k0),
        1 => Ok(k1),
        _ => Err(Error::Domain(format!("K order must be 0 or 1, got {order}"))),
    }
}

/// Kernel value together with the pieces needed for logarithmic splitting.
///
/// `g = 𝒢(r)`, `dg = 𝒢'(r)`; `log_g` and `log_dg` are the coefficients of
/// `ln r²` in `g` and `dg` respectively (smooth in `r`).
#[derive(Debug, Clone, Copy)]
pub struct KernelParts {
    pub g: Complex64,
    pub dg: Complex64,
    pub log_g: Complex64,
    pub log_dg: Complex64,
}

/// Evaluates [`KernelParts`] at `r > 0` without validating `s`.
pub fn kernel_parts(s: &SpectralParameter, r: f64) -> KernelParts {
    match *s {
        SpectralParameter::OffAxis { z } => {
            let w = z.sqrt();
            let wr = w * r;
            let (k0, k1) = mod_bessel_k01(wr);
            let (i0, i1) = mod_bessel_i01(wr);
            KernelParts { g: k0 / (2.0 * PI), dg: -w * k1 / (2.0 * PI), log_g: -i0 / (4.0 * PI), log_dg: -w * i1 / (4.0 * PI) }
        }
        SpectralParameter::LimitBranch { k, branch } => {
            let [j0, j1, y0, y1] = bessel_jy01(k * r);
            // (i/4) H_0 and its r-derivative -(i k/4) H_1.
            let g = Complex64::new(-0.25 * y0, 0.25 * j0);
            let dg = Complex64::new(0.25 * k * y1, -0.25 * k * j1);
            let parts =
                KernelParts { g, dg, log_g: Complex64::new(-j0 / (4.0 * PI), 0.0), log_dg: Complex64::new(k * j1 / (4.0 * PI), 0.0) };
            match branch {
                Branch::Minus => parts,
                Branch::Plus => KernelParts { g: parts.g.conj(), dg: parts.dg.conj(), ..parts },
            }
        }
    }
}

/// `lim_{r→0} (𝒢(r) - log_g(r) ln r²)`.
pub fn kernel_regular_limit(s: &SpectralParameter) -> Complex64 {
    match *s {
        SpectralParameter::OffAxis { z } => {
            let w = z.sqrt();
            -((w / 2.0).ln() + EULER_GAMMA) / (2.0 * PI)
        }
        SpectralParameter::LimitBranch { k, branch } => {
            let v = Complex64::new(-((k / 2.0).ln() + EULER_GAMMA) / (2.0 * PI), 0.25);
            match branch {
                Branch::Minus => v,
                Branch::Plus => v.conj(),
            }
        }
    }
}

pub fn green_kernel(s: &SpectralParameter, r: f64) -> Result<Complex64> {
    s.validate()?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!("kernel distance must be positive, got {r}")));
    }
    Ok(kernel_parts(s, r).g)
}

/// Radial derivative `𝒢'(r)`.
pub fn green_kernel_derivative(s: &SpectralParameter, r: f64) -> Result<Complex64> {
    s.validate()?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!("kernel distance must be positive, got {r}")));
    }
    Ok(kernel_parts(s, r).dg)
}

/// Far-field constant `c(k)`: an outgoing potential with pattern `F`
/// behaves like `c(k) e^{ik|x|} |x|^{-1/2} F(x̂)`.
pub fn far_field_constant(k: f64) -> Complex64 {
    Complex64::new(0.0, 0.25) * (2.0 / (PI * k)).sqrt() * Complex64::from_polar(1.0, -FRAC_PI_4)
}
