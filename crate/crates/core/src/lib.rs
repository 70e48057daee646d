//! Bounded sets of the real quadratic family `x² + c` and their conjugates.
//!
//! For `c < -2` the points whose orbits under `F_c(x) = x² + c` stay bounded form
//! a Cantor set `Λ_c ⊂ [-p, p]`. This crate builds that set as a system of nested
//! closed intervals, builds a matching nested refinement of any constructively
//! described Cantor set `Λ*`, pairs the two systems address-for-address into a
//! monotone piecewise-linear homeomorphism `φ`, and iterates the conjugated map
//! `F* = φ ∘ F_c ∘ φ⁻¹`, whose bounded set is `Λ*`.
//!
//! Module map:
//!
//! * [`quadratic`]: the map, its fixed points, the escape gap `A₀` and the expansion bound.
//! * [`model`]: the interval system `C₀ ⊇ C₁ ⊇ …` of `Λ_c` by backward preimages.
//! * [`target`]: target Cantor set descriptions and their refinement `C*ₙ`.
//! * [`conjugacy`]: the piecewise-linear `φ_N`, its inverse and `F*`.
//! * [`orbit`]: orbit classification, cobweb traces, escape-time grids.

// Negated comparisons are deliberate: NaN must take the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conjugacy;
pub mod error;
pub mod interval;
pub mod model;
pub mod orbit;
pub mod quadratic;
pub mod target;

pub use conjugacy::{build_phi, eval_fstar, ConjugateMap, MonotonePLMap};
pub use error::{Error, Result};
pub use interval::{Gap, IntervalAddress, IntervalSystem, Segment};
pub use model::build_model_system;
pub use orbit::{IteratedMap, OrbitResult, Outcome};
pub use quadratic::QuadraticParams;
pub use target::{BuildMode, CantorFamily, CantorSpec, GapTree, TargetSystem};

/// Largest refinement depth accepted anywhere in the crate.
///
/// Past this, neighbouring endpoints collide in double precision for typical parameters.
pub const MAX_DEPTH: usize = 48;
