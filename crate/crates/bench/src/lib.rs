//! Shared fixtures for the benchmarks in `benches/`.

use weyl_scatter::{BoundaryCondition, Branch, ClosedCurve, Condition, Coupling, Scatterer, SpectralParameter};

/// Outgoing limit parameter at wavenumber `k`.
pub fn outgoing(k: f64) -> SpectralParameter {
    SpectralParameter::limit(k, Branch::Minus).expect("positive wavenumber")
}

/// The five conditions with the parameters used throughout the test suites.
pub fn conditions() -> Vec<(&'static str, BoundaryCondition)> {
    vec![
        ("dirichlet", BoundaryCondition::new(Condition::Dirichlet)),
        ("neumann", BoundaryCondition::new(Condition::Neumann)),
        ("robin", BoundaryCondition::new(Condition::Robin { b_minus: Coupling::Constant(1.0), b_plus: Coupling::Constant(-1.0) })),
        ("delta", BoundaryCondition::new(Condition::Delta { alpha: Coupling::Constant(2.0) })),
        ("delta_prime", BoundaryCondition::new(Condition::DeltaPrime { beta: Coupling::Constant(2.0) })),
    ]
}

pub fn kite(bc: BoundaryCondition, n: usize) -> Scatterer {
    Scatterer::new(ClosedCurve::Kite, bc, n)
}
