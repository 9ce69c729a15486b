//! Mixed finite element discretization of an elastic body glued to a thin
//! plate, with a monolithic solver and an interface domain decomposition.

pub mod assembly;
pub mod decomposition;
pub mod elements;
pub mod error;
pub mod materials;
pub mod mesh;
pub mod overlay;
pub mod quadrature;
pub mod solvers;
pub mod sparse;
pub mod verification;

pub use error::{Error, Result};
