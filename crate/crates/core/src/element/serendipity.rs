//! Rank test for reduced dof sets.

use nalgebra::DMatrix;

use super::dofs::DofEvaluator;
use super::layout::DofLayout;
use crate::error::{Error, Result};
use crate::mesh::CellGeometry;
use crate::poly::{basis_size, Polynomial};

/// Singular values below this fraction of the largest are treated as zero.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SerendipityReport {
    pub rank: usize,
    /// `dim ℙ_{k_s}`.
    pub dimension: usize,
    pub satisfied: bool,
}

/// Rank of `[χ_σ(i)(m_j)]` over `ℙ_{k_s}` for the selected local dofs.
pub fn serendipity_check(
    geometry: &CellGeometry,
    m: usize,
    k: usize,
    k_s: usize,
    selected: &[usize],
) -> Result<SerendipityReport> {
    let layout = DofLayout::new(geometry.clone(), m, k)?;
    if let Some(&bad) = selected.iter().find(|&&i| i >= layout.len()) {
        return Err(Error::Dimension(format!(
            "selected dof {bad} outside layout of size {}",
            layout.len()
        )));
    }
    let dimension = basis_size(k_s as isize);
    if selected.is_empty() {
        return Ok(SerendipityReport {
            rank: 0,
            dimension,
            satisfied: false,
        });
    }
    let evaluator = DofEvaluator::new(&layout)?;
    let mut mat = DMatrix::zeros(selected.len(), dimension);
    for j in 0..dimension {
        let chi = evaluator.evaluate_polynomial(&Polynomial::basis(layout.frame(), k_s, j));
        for (row, &i) in selected.iter().enumerate() {
            mat[(row, j)] = chi[i];
        }
    }
    let sv = mat.singular_values();
    let top = sv.max();
    let rank = if top == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > RANK_TOLERANCE * top).count()
    };
    Ok(SerendipityReport {
        rank,
        dimension,
        satisfied: rank == dimension,
    })
}
