//! Scaled-monomial polynomial calculus over ℝ² with exact polygon and edge integration.

pub mod edge;
pub mod mass;
pub mod multi_index;
pub mod polynomial;
pub mod quadrature;
pub mod tensor;

pub use edge::{integrate_edge, EdgePolynomial};
pub use mass::{mass_matrices, CellMoments, MassMatrices};
pub use multi_index::{basis_size, binomial, edge_basis_size, enumerate_multiindices, MultiIndex};
pub use polynomial::{directional_weights, Polynomial, ScaledFrame};
pub use quadrature::{integrate_polygon_fn, LineRule, Quadrature};
pub use tensor::TensorPoly;

use crate::error::Result;
use crate::geometry::Polygon;

/// `∫_K p` by centroid-fan Gauss quadrature of exactness `deg p`.
pub fn integrate_polygon(p: &Polynomial, polygon: &Polygon) -> Result<f64> {
    p.integrate_over(polygon)
}
