//! Angle-averaged bounds on the ground and first excited levels of
//! anisotropic potentials.
//!
//! For a potential V in one, two or three dimensions the crate computes its
//! angular average V̄ and remainder ΔV = V − V̄, solves the isotropic problem
//! channel by channel and the full problem on a Cartesian grid, and checks
//! Ē₀ ≥ E₀ and (given enough symmetry) E₁ ≤ Ē₁ with error bars attached to
//! every number. [`report::run_verify`] runs the whole pipeline from a
//! config; the modules can also be used on their own.

pub mod error;
pub mod grid;
pub mod harmonics;
pub mod interp;
pub mod perturbation;
pub mod potential;
pub mod radial;
pub mod report;
pub mod symmetry;
pub mod variational;

pub use error::{Error, Result};
