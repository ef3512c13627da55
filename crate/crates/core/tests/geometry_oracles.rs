//! Grid geometry against closed-form lengths, areas and curvatures.

use proptest::prelude::*;
use std::f64::consts::PI;
use weyl_scatter::geometry::{build_arc_grid, build_grid, ArcSpec, ClosedCurve, FourierCurve};

// mpmath: 4a E(1 - b²/a²) for a = 2, b = 1
const ELLIPSE_2_1_PERIMETER: f64 = 9.688_448_220_547_676;
// mpmath quadrature of the kite parametrization
const KITE_AREA: f64 = 4.712_388_980_384_69;
const KITE_LENGTH: f64 = 9.324_022_673_284_96;

fn length(grid: &weyl_scatter::geometry::BoundaryGrid) -> f64 {
    grid.weights.iter().zip(&grid.jacobians).map(|(w, j)| w * j).sum()
}

#[test]
fn circle_length_and_curvature() {
    let g = build_grid(&ClosedCurve::Circle { radius: 1.0 }, 16).unwrap();
    assert_eq!(g.len(), 16);
    assert!((length(&g) - 2.0 * PI).abs() < 1e-14);
    let g = build_grid(&ClosedCurve::Circle { radius: 2.0 }, 16).unwrap();
    for j in 0..g.len() {
        assert!((g.curvature[j] - 0.5).abs() < 1e-14);
        let [x, y] = g.points[j];
        let [nx, ny] = g.normals[j];
        assert!((nx - x / 2.0).abs() < 1e-14 && (ny - y / 2.0).abs() < 1e-14);
        assert!((g.params[j] - PI * j as f64 / 8.0).abs() < 1e-15);
    }
}

#[test]
fn kite_and_ellipse_lengths() {
    // |x'| on the kite has a complex singularity close to the real axis:
    // the trapezoid error is 3.4e-7 at N = 64 and 9e-13 at N = 128.
    let kite = ClosedCurve::Kite;
    let a = length(&build_grid(&kite, 64).unwrap());
    let b = length(&build_grid(&kite, 128).unwrap());
    let c = length(&build_grid(&kite, 256).unwrap());
    assert!((a - b).abs() < 1e-6);
    assert!((b - c).abs() < 1e-12);
    assert!((c - KITE_LENGTH).abs() < 1e-12);
    let e = build_grid(&ClosedCurve::Ellipse { a: 2.0, b: 1.0 }, 64).unwrap();
    assert!((length(&e) - ELLIPSE_2_1_PERIMETER).abs() < 1e-12);
}

#[test]
fn divergence_theorem_smoke() {
    // ∮ ν·∇(|x|²/2) dσ = ∫ Δ(|x|²/2) = 2·area
    let g = build_grid(&ClosedCurve::Kite, 96).unwrap();
    let flux: f64 = (0..g.len())
        .map(|j| {
            let [x, y] = g.points[j];
            let [nx, ny] = g.normals[j];
            (x * nx + y * ny) * g.weights[j] * g.jacobians[j]
        })
        .sum();
    assert!((flux - 2.0 * KITE_AREA).abs() < 1e-12);
}

#[test]
fn normals_orthogonal_and_outward() {
    for curve in [ClosedCurve::Circle { radius: 1.5 }, ClosedCurve::Ellipse { a: 1.0, b: 0.4 }, ClosedCurve::Kite] {
        let g = build_grid(&curve, 64).unwrap();
        for j in 0..g.len() {
            let d = curve.derivative(g.params[j]);
            let [nx, ny] = g.normals[j];
            assert!((nx * d[0] + ny * d[1]).abs() <= 1e-12);
            assert!((nx.hypot(ny) - 1.0).abs() < 1e-14);
        }
    }
    let g = build_grid(&ClosedCurve::Circle { radius: 1.0 }, 32).unwrap();
    for j in 0..g.len() {
        for &h in &[1e-8, 1e-3, 0.5] {
            let p = g.offset_point(j, h);
            assert!(p[0].hypot(p[1]) > 1.0);
        }
    }
}

#[test]
fn grid_rejections() {
    assert!(build_grid(&ClosedCurve::Circle { radius: 1.0 }, 15).is_err());
    assert!(build_grid(&ClosedCurve::Circle { radius: 1.0 }, 6).is_err());
    assert!(build_grid(&ClosedCurve::Circle { radius: 0.0 }, 16).is_err());
    assert!(build_grid(&ClosedCurve::Ellipse { a: 1.0, b: -1.0 }, 16).is_err());
    let arc = |t0, t1| ArcSpec { parent: ClosedCurve::Kite, t0, t1 };
    assert!(build_arc_grid(&arc(1.0, 1.0), 16).is_err());
    assert!(build_arc_grid(&arc(0.0, 2.0 * PI), 16).is_err());
    assert!(build_arc_grid(&arc(0.0, 1.0), 4).is_err());
}

#[test]
fn half_circle_arc() {
    let arc = ArcSpec { parent: ClosedCurve::Circle { radius: 1.0 }, t0: 0.0, t1: PI };
    let g = build_arc_grid(&arc, 32).unwrap();
    assert!((length(&g) - PI).abs() < 1e-6);
    // Density weights integrate edge-singular functions spectrally:
    // ∫ (1 - τ²)^{-1/2} dτ over the chord parameter equals π.
    let w = g.density_weights();
    let singular: f64 = (0..g.len())
        .map(|j| {
            let tau = 2.0 * g.params[j] / PI - 1.0;
            w[j] / (1.0 - tau * tau).sqrt() * 2.0 / PI
        })
        .sum();
    assert!((singular - PI).abs() < 1e-13);
    assert!(g.params.iter().all(|&t| t > 0.0 && t < PI));
    // endpoint clustering: nearest node is O(1/N²) from each end
    let first = g.params[0];
    let first64 = build_arc_grid(&arc, 64).unwrap().params[0];
    assert!(first < 3.0 / (32.0 * 32.0));
    assert!((first / first64 - 4.0).abs() < 0.05);
}

#[test]
fn arc_gap_refinement() {
    let arc = ArcSpec { parent: ClosedCurve::Kite, t0: 0.3, t1: 4.0 };
    let gap = |n| {
        let g = build_arc_grid(&arc, n).unwrap();
        g.params.windows(2).map(|w| w[1] - w[0]).fold(0.0f64, f64::max)
    };
    let (a, b, c) = (gap(16), gap(32), gap(64));
    assert!((a / b - 2.0).abs() < 0.1 && (b / c - 2.0).abs() < 0.1);
}

#[test]
fn tabulated_fourier_curve() {
    // The kite written as Fourier rows (a_x, b_x, a_y, b_y) per mode.
    let text = "# kite\n-0.65 0 0 0\n1 0 0 1.5\n0.65 0 0 0\n";
    let curve = ClosedCurve::TabulatedSmooth(FourierCurve::parse(text).unwrap());
    let a = build_grid(&curve, 64).unwrap();
    let b = build_grid(&ClosedCurve::Kite, 64).unwrap();
    for j in 0..64 {
        for c in 0..2 {
            assert!((a.points[j][c] - b.points[j][c]).abs() < 1e-14);
            assert!((a.normals[j][c] - b.normals[j][c]).abs() < 1e-14);
        }
        assert!((a.curvature[j] - b.curvature[j]).abs() < 1e-12);
    }
    // clockwise orientation and degenerate curves are refused
    assert!(build_grid(&ClosedCurve::TabulatedSmooth(FourierCurve::parse("0 0 0 0\n1 0 0 -1\n").unwrap()), 16).is_err());
    assert!(build_grid(&ClosedCurve::TabulatedSmooth(FourierCurve::parse("0 0 0 0\n1 0 1 0\n").unwrap()), 16).is_err());
    assert!(FourierCurve::parse("1 2 3\n").is_err());
    assert!(FourierCurve::parse("1 2 x 4\n").is_err());
}

proptest! {
    #[test]
    fn ellipse_grids_are_consistent(a in 0.3f64..3.0, b in 0.3f64..3.0, half in 8usize..64) {
        let n = 2 * half;
        let g = build_grid(&ClosedCurve::Ellipse { a, b }, n).unwrap();
        for j in 0..n {
            let [x, y] = g.points[j];
            prop_assert!(((x / a).powi(2) + (y / b).powi(2) - 1.0).abs() < 1e-13);
            prop_assert!(g.curvature[j] > 0.0);
            let p = g.offset_point(j, 1e-3);
            prop_assert!((p[0] / a).powi(2) + (p[1] / b).powi(2) > 1.0);
        }
    }

    #[test]
    fn arc_nodes_strictly_inside(t0 in -3.0f64..3.0, len in 0.1f64..6.2, n in 8usize..80) {
        let arc = ArcSpec { parent: ClosedCurve::Kite, t0, t1: t0 + len };
        let g = build_arc_grid(&arc, n).unwrap();
        prop_assert_eq!(g.len(), n);
        prop_assert!(g.params.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(g.params[0] > t0 && g.params[n - 1] < t0 + len);
        let smooth: f64 = g.sigma_weights().iter().sum();
        let dens: f64 = g.density_weights().iter().sum();
        prop_assert!((smooth - dens).abs() < 0.05 * smooth);
    }
}
