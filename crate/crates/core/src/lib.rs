//! Bregman-geometry toolkit: Legendre functions, Bregman projections,
//! mixed-equilibrium resolvents, and strongly convergent fixed-point
//! iterations, with verification routines for every structural identity
//! the solvers rely on.

pub mod error;
pub mod scalar;
pub mod linalg;
pub mod points;
pub mod geometry;
pub mod sets;
pub mod sampling;
pub mod equilibrium;
pub mod operators;
pub mod algorithms;
pub mod config;
pub mod report;
pub mod suites;

pub use error::{Error, Result};
pub use scalar::Real;

/// Concrete f64 aliases for the common case.
pub type Point = points::PrimalPoint<f64>;
pub type Dual = points::DualPoint<f64>;
pub type Geometry = geometry::LegendreFunction<f64>;
pub type Set = sets::ConvexSet<f64>;
