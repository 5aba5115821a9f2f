//! schlafli-lab: a numerical laboratory for variation formulas of hyperbolic
//! volumes and dual volumes at desk scale.
//!
//! The crate provides hyperboloid-model primitives for H³, compact convex
//! polyhedra with edge lengths and exterior dihedral angles, verification
//! engines for the Schläfli formula and its dual, equidistant-surface
//! geometry (tube volumes, fundamental forms, finitely bent chains), and
//! holonomy-side length derivatives. Every identity ships with an
//! independently assembled check; the `harness` module batches them into
//! machine-readable suites behind the `schlafli-lab` binary.

pub mod error;
pub mod harness;
pub mod laminations;
pub mod minkowski;
pub mod numerics;
pub mod polyhedra;
pub mod tol;
pub mod tubes;
pub mod variation;

pub use error::{Error, Result};
