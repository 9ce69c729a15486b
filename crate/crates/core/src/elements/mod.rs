//! Finite element spaces: linear Lagrange, Morley, and Hu–Ma stress.

pub mod dofmap;
pub mod huma;
pub mod lagrange;
pub mod morley;

pub use dofmap::{ContinuousP1Map, DiscontinuousP1Map, DofEntity, PlateDofMap, StressDofMap};
pub use huma::{HuMaElement, HUMA_DIM};
pub use lagrange::{P1Tet, P1Tri};
pub use morley::{lower_morley_to_p1, MorleyElement};
