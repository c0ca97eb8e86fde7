//! Numerical toolkit for the first Robin-Neumann eigenvalue on holed convex
//! domains.
//!
//! The spherical shell `A = B_{R2} \ B_{R1}` maximizes `λ₁(β, Ω)` among convex
//! holed sets with fixed outer perimeter and fixed volume. This crate provides
//! the pieces needed to check that statement and its quantitative versions
//! numerically:
//!
//! * [`specfun`]: Bessel functions `J, Y, I, K` for the orders that occur in
//!   dimensions two and three.
//! * [`shell`]: the radial eigenpair of the shell.
//! * [`steklov_radial`]: the radial Steklov-Neumann solution and the
//!   quantities `η, μ, h, f, A₀, A₁, A₂` derived from it.
//! * [`domains`]: star-shaped boundary profiles, volumes, perimeters,
//!   constraint projection, support functions and inner parallel sets.
//! * [`steklov_quotient`]: the outer-boundary quotient `N/D`.
//! * [`asymmetry`]: the web test function and the hybrid asymmetry.
//! * [`fem`]: a P1 solver for the Robin-Neumann and Steklov-Neumann problems
//!   on meshed planar holed domains.
//! * [`harness`]: configuration, sweeps and result files used by the CLI.

pub mod asymmetry;
pub mod domains;
mod error;
pub mod fem;
pub mod harness;
pub mod optim;
pub mod quadrature;
pub mod shell;
pub mod specfun;
pub mod steklov_quotient;
pub mod steklov_radial;

pub use asymmetry::{AsymmetryReport, WebFunction};
pub use domains::{BoundaryProfile, HoledDomain};
pub use error::{Error, Result};
pub use fem::{DiscreteEigenResult, Mesh2D};
pub use shell::{RadialEigenpair, ShellGeometry};
pub use specfun::BesselOrder;
pub use steklov_quotient::QuotientEvaluation;
pub use steklov_radial::SteklovRadialContext;

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}
