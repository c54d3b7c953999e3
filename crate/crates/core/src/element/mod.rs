//! Local degrees of freedom and the element matrices.

pub mod dofs;
pub mod layout;
pub mod matrices;
pub mod serendipity;

pub use dofs::{dof_evaluate, finite_difference_mismatch, DofEvaluator, ScalarField, ZeroField};
pub use layout::{check_parameters, dof_layout, edge_moments_for, DofDescriptor, DofKind, DofLayout};
pub use matrices::{element_matrices, field_moments, project, ElementMatrices, LoadRegime};
pub use serendipity::{serendipity_check, SerendipityReport};
