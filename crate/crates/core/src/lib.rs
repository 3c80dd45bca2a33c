//! Infinitesimal inversive rigidity of planar circle frameworks.
//!
//! A circle framework assigns a circle to every vertex of a graph; its edges
//! constrain inversive distances. This crate builds the inversive rigidity
//! and stress matrices of a framework, decides infinitesimal rigidity by
//! rank, extracts flexes and equilibrium stresses, and constructs univalent
//! tangency packings for triangulations of the sphere.

pub mod circle;
pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod framework;
pub mod io;
pub mod linalg;
pub mod packing;
pub mod rigidity;
pub mod svg;
pub mod sweep;
mod triangulation;

pub use circle::{inversive_distance, Circle, MoebiusAtom, MoebiusMap};
pub use error::{Error, Result};
pub use framework::{CFramework, Triangulation};
pub use linalg::TolPolicy;
