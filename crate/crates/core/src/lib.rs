//! Finite models of `C(K)` for scattered `K` (finite discrete sets, `c₀`,
//! `C[0, ω]`) and the geometry of slices of their unit balls.
//!
//! * [`model`]: points, functionals, slices, convex combinations.
//! * [`circle`]: the chord bound on the unit circle.
//! * [`decomposition`]: box neighborhoods inside a convex combination of
//!   slices, and the explicit witnesses for each of their points.
//! * [`diameter`]: exact `ℓ∞ⁿ` diameters and sampled shrinkage experiments.
//! * [`sphere`]: points of a convex combination of slices on the unit sphere.
//! * [`campaign`]: random decomposition instances and campaigns.
//! * [`scenario`]: JSON scenarios and reports used by the `slice-lab` binary.

pub mod campaign;
pub mod check;
pub mod circle;
pub mod decomposition;
pub mod diameter;
pub mod error;
pub mod model;
pub mod scenario;
pub mod sphere;

pub use error::{Error, Result};
