//! Exact lattices, discriminant forms, isometry search and finite matrix groups,
//! with the Leech lattice and fixed-point sublattice classification built on top.

// index loops read most clearly in the matrix kernels
#![allow(clippy::needless_range_loop)]

pub mod backtrack;
pub mod classify;
pub mod enumerate;
pub mod error;
pub mod fqs;
pub mod group;
pub mod io;
pub mod isometry;
pub mod lattice;
pub mod leech;
pub mod limits;
pub mod linalg;
pub mod perm;
pub mod roots;

pub use error::{Error, Result};
