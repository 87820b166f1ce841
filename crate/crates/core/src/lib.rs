//! Exact homological algebra for the homotopy category of complexes of
//! projective modules over `Z`, `Z/n` and `F_p`.
//!
//! The crate builds, for a finitely presented module `M`, the dual of a
//! projective resolution of `M*` together with the comparison map
//! `M -> P*`, and checks on concrete inputs that these complexes behave as
//! compact generators: Hom into them computes `H^0 Hom(M, -)`, they detect
//! acyclic complexes, and resolutions of right modules are finitely built
//! from them. Every check returns witnesses (splittings, homotopies,
//! flatness certificates, build trees) that can be re-verified by matrix
//! multiplication alone.

pub mod error;
pub mod ring;
pub mod matrix;
mod hermite;
pub mod linalg;
pub mod module;
pub mod graded;
pub mod complex;
pub mod hom;
pub mod homotopy;
pub mod generator;
pub mod flatness;
pub mod duality;
pub mod sample;
pub mod io;
pub mod cli;

pub use error::{Error, Result};
pub use matrix::RingMatrix;
pub use ring::{Elem, Ring, Side};

/// Cohomological degree.
pub type Degree = i64;
