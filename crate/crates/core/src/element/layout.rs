//! Canonical local ordering of the degrees of freedom.
//!
//! Vertex block: for each loop vertex, `h_K^j ∂^α v(δ)` for `|α| = j ≤ m-2`,
//! graded-lex. Edge block: for each loop edge and `a = 0..m-1`, the moments
//! `|e|^{a-1} ∫_e ∂_{ν_e}^a v · s^i`, `i ≤ k-(2m-1-a)`, taken in the global edge
//! frame. Interior block: `|K|^{-1} ∫_K v m_α`, `|α| ≤ k-2m`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::CellGeometry;
use crate::poly::{basis_size, MultiIndex, ScaledFrame};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DofKind {
    Vertex { vertex: usize, alpha: MultiIndex },
    Edge { edge: usize, normal_order: usize, moment: usize },
    Interior { alpha: MultiIndex },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DofDescriptor {
    pub kind: DofKind,
    /// Prefactor in the dof definition: `h_K^j`, `|e|^{a-1}` or `|K|^{-1}`.
    pub scale: f64,
}

impl DofDescriptor {
    pub fn is_boundary(&self) -> bool {
        !matches!(self.kind, DofKind::Interior { .. })
    }
}

/// Moment count per edge for the `a`-th normal derivative.
pub fn edge_moments_for(m: usize, k: usize, a: usize) -> usize {
    basis_size_1d(k as isize - (2 * m as isize - 1 - a as isize))
}

fn basis_size_1d(degree: isize) -> usize {
    if degree < 0 {
        0
    } else {
        degree as usize + 1
    }
}

#[derive(Clone, Debug)]
pub struct DofLayout {
    geometry: CellGeometry,
    m: usize,
    k: usize,
    frame: ScaledFrame,
    area: f64,
    per_vertex: usize,
    per_edge: usize,
    edge_block_offsets: Vec<usize>,
    descriptors: Vec<DofDescriptor>,
}

pub fn dof_layout(geometry: &CellGeometry, m: usize, k: usize) -> Result<DofLayout> {
    DofLayout::new(geometry.clone(), m, k)
}

impl DofLayout {
    pub fn new(geometry: CellGeometry, m: usize, k: usize) -> Result<Self> {
        check_parameters(m, k)?;
        let frame = ScaledFrame::of_polygon(&geometry.polygon);
        let h = frame.scale;
        let area = geometry.area();
        let per_vertex = m * (m - 1) / 2;
        let mut edge_block_offsets = Vec::with_capacity(m + 1);
        let mut acc = 0;
        for a in 0..m {
            edge_block_offsets.push(acc);
            acc += edge_moments_for(m, k, a);
        }
        edge_block_offsets.push(acc);
        let per_edge = acc;

        let mut descriptors = Vec::new();
        for vertex in 0..geometry.num_vertices() {
            for pos in 0..per_vertex {
                let alpha = MultiIndex::from_position(pos);
                descriptors.push(DofDescriptor {
                    kind: DofKind::Vertex { vertex, alpha },
                    scale: h.powi(alpha.order() as i32),
                });
            }
        }
        for (edge, ce) in geometry.edges.iter().enumerate() {
            for a in 0..m {
                for moment in 0..edge_moments_for(m, k, a) {
                    descriptors.push(DofDescriptor {
                        kind: DofKind::Edge {
                            edge,
                            normal_order: a,
                            moment,
                        },
                        scale: ce.frame.length.powi(a as i32 - 1),
                    });
                }
            }
        }
        for pos in 0..basis_size(k as isize - 2 * m as isize) {
            descriptors.push(DofDescriptor {
                kind: DofKind::Interior {
                    alpha: MultiIndex::from_position(pos),
                },
                scale: 1.0 / area,
            });
        }
        Ok(Self {
            geometry,
            m,
            k,
            frame,
            area,
            per_vertex,
            per_edge,
            edge_block_offsets,
            descriptors,
        })
    }

    pub fn geometry(&self) -> &CellGeometry {
        &self.geometry
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn frame(&self) -> ScaledFrame {
        self.frame
    }

    /// `h_K`.
    pub fn diameter(&self) -> f64 {
        self.frame.scale
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// `N_K`.
    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    pub fn descriptors(&self) -> &[DofDescriptor] {
        &self.descriptors
    }

    pub fn per_vertex(&self) -> usize {
        self.per_vertex
    }

    pub fn per_edge(&self) -> usize {
        self.per_edge
    }

    /// Number of vertex and edge dofs; they precede the interior block.
    pub fn num_boundary(&self) -> usize {
        self.geometry.num_vertices() * self.per_vertex + self.geometry.num_edges() * self.per_edge
    }

    pub fn num_interior(&self) -> usize {
        self.len() - self.num_boundary()
    }

    /// `n_k = dim ℙ_k`.
    pub fn poly_dim(&self) -> usize {
        basis_size(self.k as isize)
    }

    /// `n_{m-1} = dim ℙ_{m-1}`, the number of constraint rows.
    pub fn kernel_dim(&self) -> usize {
        basis_size(self.m as isize - 1)
    }

    /// `k - 2m` as a signed degree; negative when there are no interior dofs.
    pub fn interior_degree(&self) -> isize {
        self.k as isize - 2 * self.m as isize
    }

    pub fn vertex_dof(&self, vertex: usize, alpha: MultiIndex) -> usize {
        debug_assert!(alpha.order() + 2 <= self.m);
        vertex * self.per_vertex + alpha.position()
    }

    pub fn edge_moments(&self, normal_order: usize) -> usize {
        self.edge_block_offsets[normal_order + 1] - self.edge_block_offsets[normal_order]
    }

    pub fn edge_dof(&self, edge: usize, normal_order: usize, moment: usize) -> usize {
        debug_assert!(moment < self.edge_moments(normal_order));
        self.geometry.num_vertices() * self.per_vertex
            + edge * self.per_edge
            + self.edge_block_offsets[normal_order]
            + moment
    }

    pub fn interior_dof(&self, alpha: MultiIndex) -> usize {
        self.num_boundary() + alpha.position()
    }
}

pub fn check_parameters(m: usize, k: usize) -> Result<()> {
    if m <= 2 {
        return Err(Error::Parameter(format!(
            "order m = {m} not supported; the planar element requires m >= 3"
        )));
    }
    if k < m {
        return Err(Error::Parameter(format!(
            "degree k = {k} must be at least m = {m}"
        )));
    }
    Ok(())
}
