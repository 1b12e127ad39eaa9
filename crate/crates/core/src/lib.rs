//! Planar simulator for the volume-constrained quasi-static droplet flow
//! and numerical diagnostics for the overdetermined torsion (Serrin) problem.
//!
//! The free boundary is a star-shaped curve sampled at uniform angles. Each
//! time slice solves the constrained torsion problem
//! `-Δu = λ in Ω, u = 0 on ∂Ω, ∫u = Vol` with a boundary integral method and
//! moves the boundary with normal velocity `F(|Du|)`.
//!
//! Module map:
//! - [`geometry`]: star domains, boundary geometry, measures, asymmetry,
//!   reflection diagnostics and snapshot files.
//! - [`matcalc`]: normalized symmetric functions of eigenvalues.
//! - [`torsion`]: the constrained torsion solver and interior evaluators.
//! - [`identities`]: integration-by-parts identities checked on solutions.
//! - [`stability`]: energy, Serrin deficit, ball closed forms and stability ratios.
//! - [`dynamics`]: time integration of the free boundary flow.
//! - [`scenario`]: declarative run configuration.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod identities;
pub mod matcalc;
pub mod optimize;
pub mod quadrature;
pub mod scenario;
pub mod spectral;
pub mod stability;
pub mod torsion;

pub use error::{Error, Result};
pub use geometry::{ShapeSpec, StarDomain, Vec2};
pub use torsion::{solve_torsion, TorsionSolution};
