//! Self-consistency of the analytic oracles, and the brute-force assembly
//! against the production Nyström path.

use num_complex::Complex64;
use proptest::prelude::*;
use weyl_scatter::geometry::{build_grid, ClosedCurve};
use weyl_scatter::layerops::assemble;
use weyl_scatter::oracle::{brute_force_operators, brute_force_weyl, circle_symbols, mie_farfield, mode_coefficient, symbol_amplitude};
use weyl_scatter::scattering::DirectionGrid;
use weyl_scatter::specfun::{bessel_j_with_derivative, hankel1, hankel1_with_derivative, Branch, SpectralParameter};
use weyl_scatter::weyl::{assemble_weyl, solve_weyl, trace_plane_wave, weighted_asymmetry, BoundaryCondition, Condition};
use weyl_scatter::CMatrix;

fn catalog() -> Vec<BoundaryCondition> {
    vec![
        BoundaryCondition::dirichlet(),
        BoundaryCondition::neumann(),
        BoundaryCondition::robin(1.0, -1.0),
        BoundaryCondition::delta(2.0),
        BoundaryCondition::delta_prime(2.0),
    ]
}

fn max_rel(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = b.iter().map(|c| c.norm()).fold(0.0, f64::max);
    (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max) / scale
}

#[test]
fn symbols_are_even_in_n_and_satisfy_jumps() {
    let sym = circle_symbols(2.0, 1.3, 30).unwrap();
    for n in 0..=30 {
        assert_eq!(sym.v(n), sym.v(-n));
        assert_eq!(sym.t(n), sym.t(-n));
        // [γ₀]DL = 1 and [γ₁]SL = −1 per unit density
        let dl = sym.dl_dirichlet_trace(n, true) - sym.dl_dirichlet_trace(n, false);
        let sl = sym.sl_neumann_trace(n, true) - sym.sl_neumann_trace(n, false);
        assert!((dl - 1.0).norm() < 1e-12, "n = {n}: {dl}");
        assert!((sl + 1.0).norm() < 1e-12, "n = {n}: {sl}");
        // the averages are the symbols, so exterior traces are K + ½, K′ − ½
        assert!((sym.dl_dirichlet_trace(n, true) - sym.k_dl(n) - 0.5).norm() < 1e-12);
        assert!((sym.sl_neumann_trace(n, true) - sym.k_sl(n) + 0.5).norm() < 1e-12);
    }
}

#[test]
fn calderon_identity_per_mode() {
    // V T = K² − ¼ (and T V = K′² − ¼): fixes the ±½ placement.
    for &(k, r) in &[(0.5, 1.0), (2.0, 1.0), (5.0, 0.8)] {
        let sym = circle_symbols(k, r, 25).unwrap();
        for n in 0..=25 {
            let lhs = sym.v(n) * sym.t(n);
            let rhs = sym.k_dl(n) * sym.k_dl(n) - 0.25;
            assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()), "k={k} n={n}: {:e}", (lhs - rhs).norm());
        }
    }
}

#[test]
fn v_symbol_reference_and_decay() {
    let sym = circle_symbols(1.0, 1.0, 40).unwrap();
    let want =
        Complex64::new(0.0, std::f64::consts::PI / 2.0) * weyl_scatter::specfun::bessel_j(0, 1.0).unwrap() * hankel1(0, 1.0).unwrap();
    assert!((sym.v(0) - want).norm() < 1e-15);
    // high-N Nyström applied to a constant density
    let grid = build_grid(&ClosedCurve::Circle { radius: 1.0 }, 1024).unwrap();
    let ops = assemble(&SpectralParameter::limit(1.0, Branch::Minus).unwrap(), &grid).unwrap();
    let row: Complex64 = ops.v.row(0).iter().sum();
    assert!((row - sym.v(0)).norm() < 1e-12);
    let sym = circle_symbols(2.0, 1.0, 40).unwrap();
    for n in 4..40 {
        assert!(sym.v(n + 1).norm() < sym.v(n).norm());
    }
}

#[test]
fn partial_wave_unitarity_for_every_condition() {
    for bc in catalog() {
        for &k in &[0.5, 2.0, 5.0] {
            for n in 0..40 {
                let c = mode_coefficient(&bc.condition, k, 1.0, n).unwrap();
                assert!(((1.0 + 2.0 * c).norm() - 1.0).abs() < 1e-12, "{} k={k} n={n}", bc.kind_name());
            }
        }
    }
}

#[test]
fn closed_form_coefficients() {
    let (k, r) = (2.0, 1.0);
    let (j, jd) = bessel_j_with_derivative(10, k * r).unwrap();
    let (h, hd) = hankel1_with_derivative(10, k * r).unwrap();
    for n in 0..10usize {
        let d = mode_coefficient(&Condition::Dirichlet, k, r, n as i32).unwrap();
        assert!((d + j[n] / h[n]).norm() < 1e-14);
        let nm = mode_coefficient(&Condition::Neumann, k, r, n as i32).unwrap();
        assert!((nm + jd[n] / hd[n]).norm() < 1e-14);
        for free in [BoundaryCondition::delta(0.0), BoundaryCondition::delta_prime(0.0)] {
            assert_eq!(mode_coefficient(&free.condition, k, r, n as i32).unwrap(), Complex64::from(0.0));
        }
    }
}

#[test]
fn weyl_symbols_reproduce_mode_matching_in_both_pairings() {
    let dirs = DirectionGrid::uniform(16).unwrap();
    for bc in catalog() {
        for &k in &[0.5, 2.0, 5.0] {
            let mie = mie_farfield(&bc, k, 1.0, &dirs).unwrap();
            let direct = symbol_amplitude(&bc, k, 1.0, &dirs, false).unwrap();
            let dual = symbol_amplitude(&bc, k, 1.0, &dirs, true).unwrap();
            assert!(max_rel(&direct.amplitude, &mie.amplitude) < 1e-10, "{} k={k}", bc.kind_name());
            assert!(max_rel(&dual.amplitude, &direct.amplitude) < 1e-10, "{} k={k}", bc.kind_name());
        }
    }
}

#[test]
fn mie_refuses_arcs_and_tabulated_couplings() {
    let dirs = DirectionGrid::uniform(8).unwrap();
    assert!(mie_farfield(&BoundaryCondition::dirichlet().on_arc(0.0, 1.0), 1.0, 1.0, &dirs).is_err());
    let bc = BoundaryCondition::new(Condition::Delta { alpha: weyl_scatter::Coupling::Samples(vec![1.0, 2.0]) });
    assert!(mie_farfield(&bc, 1.0, 1.0, &dirs).is_err());
}

/// Relative difference of two operators applied to the low Fourier modes
/// `e^{imt}`, `|m| ≤ N/4`, on which both quadratures are spectrally accurate.
fn low_mode_action_diff(a: &CMatrix, b: &CMatrix, params: &[f64]) -> f64 {
    let n = params.len();
    let mut worst: f64 = 0.0;
    for m in -(n as i32 / 4)..=(n as i32 / 4) {
        let e = nalgebra::DVector::from_iterator(n, params.iter().map(|t| Complex64::from_polar(1.0, m as f64 * t)));
        let (x, y) = (a * &e, b * &e);
        let scale = y.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        worst = worst.max((x - &y).iter().map(|c| c.norm()).fold(0.0, f64::max) / scale);
    }
    worst
}

#[test]
fn brute_force_agrees_with_production_on_the_circle() {
    let k = 1.0;
    let s = SpectralParameter::limit(k, Branch::Minus).unwrap();
    for &n in &[16usize, 32] {
        let grid = build_grid(&ClosedCurve::Circle { radius: 1.0 }, n).unwrap();
        let tr = trace_plane_wave(k, [1.0, 0.0], &grid).unwrap();
        let tol = if n == 16 { 1e-3 } else { 1e-4 };
        for bc in catalog() {
            let bf = brute_force_weyl(&bc, &s, &grid, &tr.dirichlet, &tr.neumann).unwrap();
            let sys = assemble_weyl(&bc, &s, &grid).unwrap();
            let dens = solve_weyl(&sys, &tr).unwrap();
            let num: f64 =
                dens.phi.iter().zip(&bf.phi).chain(dens.psi.iter().zip(&bf.psi)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            let den: f64 = bf.phi.iter().chain(&bf.psi).map(|c| c.norm()).fold(0.0, f64::max);
            assert!(num / den < tol, "{} N={n}: {:e}", bc.kind_name(), num / den);
        }
        let bf = brute_force_operators(&s, &grid).unwrap();
        let ops = assemble(&s, &grid).unwrap();
        for (name, a, b) in [("V", &ops.v, &bf.v), ("K", &ops.k, &bf.k_dl), ("K'", &ops.k_adj, &bf.k_sl), ("T", &ops.t, &bf.t)] {
            let d = low_mode_action_diff(a, b, &grid.params);
            assert!(d < tol, "{name} N={n}: {d:e}");
        }
        // kernel symmetry survives the brute-force integration on the circle
        assert!(weighted_asymmetry(&bf.v, &grid.density_weights()) < 1e-8);
    }
}

#[test]
fn brute_force_on_a_kite() {
    let s = SpectralParameter::limit(2.0, Branch::Minus).unwrap();
    let mut asym = Vec::new();
    for n in [16usize, 32] {
        let grid = build_grid(&ClosedCurve::Kite, n).unwrap();
        let bf = brute_force_operators(&s, &grid).unwrap();
        let ops = assemble(&s, &grid).unwrap();
        let d = low_mode_action_diff(&ops.v, &bf.v, &grid.params);
        assert!(d < if n == 16 { 5e-2 } else { 5e-3 }, "{d:e}");
        // collocation against the Lagrange basis is symmetric only up to the
        // discretization error off the circle
        asym.push(weighted_asymmetry(&bf.v, &grid.density_weights()));
    }
    assert!(asym[1] < 0.2 * asym[0], "{asym:?}");
    let grid = build_grid(&ClosedCurve::Kite, 16).unwrap();
    let zero = vec![Complex64::from(0.0); 16];
    let out = brute_force_weyl(&BoundaryCondition::dirichlet(), &s, &grid, &zero, &zero).unwrap();
    assert!(out.phi.iter().all(|c| *c == Complex64::from(0.0)));
    assert!(brute_force_operators(&s, &build_grid(&ClosedCurve::Kite, 64).unwrap()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn elastic_unitarity_random_parameters(k in 0.1f64..8.0, r in 0.3f64..2.0, a in -20.0f64..20.0, b in -5.0f64..5.0, n in 0i32..30) {
        let conds = [
            BoundaryCondition::delta(a).condition,
            BoundaryCondition::delta_prime(a).condition,
            BoundaryCondition::robin(b + 0.5, b - 0.5).condition,
        ];
        for c in conds {
            let cn = mode_coefficient(&c, k, r, n).unwrap();
            prop_assert!(((1.0 + 2.0 * cn).norm() - 1.0).abs() < 1e-10);
        }
    }
}
