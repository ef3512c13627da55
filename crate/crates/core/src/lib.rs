//! Boundary-integral scattering by curves in the plane carrying Dirichlet,
//! Neumann, Robin, δ and δ′ conditions, on closed curves or open arcs.
//!
//! The pipeline is: [`geometry`] builds a quadrature grid, [`layerops`]
//! discretises the layer operators, [`weyl`] assembles and factorises the
//! Weyl system of the boundary condition, and [`scattering`] turns its
//! solutions into amplitudes, S-matrices, fields and resolvent kernels.
//! [`oracle`] holds independent reference solutions and [`validation`] the
//! shared check suite.

pub mod error;
pub mod geometry;
pub mod layerops;
pub mod oracle;
pub mod scattering;
pub mod specfun;
pub mod validation;
pub mod weyl;

pub use error::{Error, Result};
pub use geometry::{ArcSpec, BoundaryGrid, ClosedCurve, Point};
pub use num_complex::Complex64;
pub use scattering::{DirectionGrid, FarField, SMatrix, Scatterer};
pub use specfun::{Branch, SpectralParameter};
pub use weyl::{BoundaryCondition, Condition, Coupling, Support};

/// Dense complex matrix used throughout.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
