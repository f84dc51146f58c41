//! Numerical laboratory for the boundary-singular Liouville equation
//!
//! The equation under study is
//!
//! ```text
//! -Δu = |x - x0|^(-2α) V(x) e^u   in B1(0),    u = 0 on ∂B1(0),
//! ```
//!
//! with a singular point `x0` on the unit circle and `α ∈ (0, 1/2)`. The
//! crate solves the equivalent fixed-point problem `u = G[λ V w e^u]` through
//! the Dirichlet Green function of the disk, drives solution families toward
//! mass concentration, and measures the concentration structure: recursive
//! blow-up extraction, local-mass quantization against the 8π bubble mass,
//! exterior boundedness, and the Pohozaev balance on the half-disk chart.
//!
//! Module map:
//! - [`disk`]: disk/half-disk geometry, graded polar meshes, exact Green kernel;
//! - [`quad`]: power-weight and logarithmic-kernel quadrature, the Green operator;
//! - [`linalg`]: dense LU on top of the system LAPACK;
//! - [`potential`]: prescribed-curvature functions with exact Hölder data;
//! - [`solver`]: damped Newton, fold handling, mass-targeted continuation;
//! - [`families`]: exact bubble profiles and synthetic concentrating families;
//! - [`extract`]: recursive maximum extraction and quantization diagnostics;
//! - [`pohozaev`]: half-disk Pohozaev terms, gradients, identity closure;
//! - [`config`] / [`report`]: run configuration and deterministic output files.

pub mod config;
pub mod disk;
pub mod extract;
pub mod families;
pub mod linalg;
pub mod pohozaev;
pub mod potential;
pub mod quad;
pub mod report;
pub mod solver;

/// Total mass carried by one standard bubble on the whole plane.
pub const BUBBLE_MASS: f64 = 8.0 * std::f64::consts::PI;
