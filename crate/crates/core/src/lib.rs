//! Nonconforming virtual element method for the polyharmonic equation
//! `(-Δ)^m u = f` with `m >= 3` on polygonal meshes of the plane.

pub mod assembly;
pub mod element;
pub mod error;
pub mod geometry;
pub mod green;
pub mod harness;
pub mod mesh;
pub mod poly;

pub use error::{Error, Result};
