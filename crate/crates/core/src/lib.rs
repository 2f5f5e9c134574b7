//! Classification of Galois actions on Picard lattices of del Pezzo surfaces
//! of degree 1 to 4 whose first cohomology vanishes on every subgroup.

pub mod error;
pub mod lattice;
pub mod perm;
pub mod weyl;
pub mod cohomology;
pub mod classify;

pub use error::{Error, Result};
