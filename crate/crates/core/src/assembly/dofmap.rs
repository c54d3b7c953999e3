//! Global numbering of the degrees of freedom.
//!
//! Vertex unknowns are the unscaled derivatives `∂^α v(δ)`; a cell sees them
//! multiplied by its own `h_K^{|α|}`. Edge unknowns live in the global edge
//! frame and are shared verbatim. Interior unknowns belong to one cell.

use crate::element::{check_parameters, edge_moments_for};
use crate::error::Result;
use crate::mesh::PolyMesh;
use crate::poly::{basis_size, MultiIndex};

/// Where a local dof lives globally: `local = sign · scale · global`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DofLink {
    pub global: usize,
    pub sign: f64,
    pub scale: f64,
}

impl DofLink {
    pub fn factor(&self) -> f64 {
        self.sign * self.scale
    }
}

#[derive(Clone, Debug)]
pub struct GlobalDofMap {
    m: usize,
    k: usize,
    per_vertex: usize,
    per_edge: usize,
    per_cell: usize,
    edge_offset: usize,
    cell_offset: usize,
    len: usize,
    links: Vec<Vec<DofLink>>,
    boundary: Vec<bool>,
    free: Vec<usize>,
}

pub fn build_dof_map(mesh: &PolyMesh, m: usize, k: usize) -> Result<GlobalDofMap> {
    GlobalDofMap::new(mesh, m, k)
}

impl GlobalDofMap {
    pub fn new(mesh: &PolyMesh, m: usize, k: usize) -> Result<Self> {
        check_parameters(m, k)?;
        let per_vertex = m * (m - 1) / 2;
        let per_edge: usize = (0..m).map(|a| edge_moments_for(m, k, a)).sum();
        let per_cell = basis_size(k as isize - 2 * m as isize);
        let edge_offset = mesh.num_vertices() * per_vertex;
        let cell_offset = edge_offset + mesh.num_edges() * per_edge;
        let len = cell_offset + mesh.num_cells() * per_cell;

        let mut boundary = vec![false; len];
        for v in (0..mesh.num_vertices()).filter(|&v| mesh.is_boundary_vertex(v)) {
            boundary[v * per_vertex..(v + 1) * per_vertex].fill(true);
        }
        for e in (0..mesh.num_edges()).filter(|&e| mesh.is_boundary_edge(e)) {
            let start = edge_offset + e * per_edge;
            boundary[start..start + per_edge].fill(true);
        }
        let free = (0..len).filter(|&i| !boundary[i]).collect();

        let links = (0..mesh.num_cells())
            .map(|c| {
                let h = mesh.cell_polygon(c).diameter();
                let mut out = Vec::new();
                for &v in &mesh.cells()[c] {
                    for pos in 0..per_vertex {
                        out.push(DofLink {
                            global: v * per_vertex + pos,
                            sign: 1.0,
                            scale: h.powi(MultiIndex::from_position(pos).order() as i32),
                        });
                    }
                }
                for &(e, _) in mesh.cell_edges(c) {
                    // edge dofs use the global frame on both sides
                    out.extend((0..per_edge).map(|i| DofLink {
                        global: edge_offset + e * per_edge + i,
                        sign: 1.0,
                        scale: 1.0,
                    }));
                }
                out.extend((0..per_cell).map(|i| DofLink {
                    global: cell_offset + c * per_cell + i,
                    sign: 1.0,
                    scale: 1.0,
                }));
                out
            })
            .collect();

        Ok(Self {
            m,
            k,
            per_vertex,
            per_edge,
            per_cell,
            edge_offset,
            cell_offset,
            len,
            links,
            boundary,
            free,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn per_vertex(&self) -> usize {
        self.per_vertex
    }

    pub fn per_edge(&self) -> usize {
        self.per_edge
    }

    pub fn per_cell(&self) -> usize {
        self.per_cell
    }

    pub fn vertex_dof(&self, vertex: usize, alpha: MultiIndex) -> usize {
        vertex * self.per_vertex + alpha.position()
    }

    pub fn edge_dofs(&self, edge: usize) -> std::ops::Range<usize> {
        let start = self.edge_offset + edge * self.per_edge;
        start..start + self.per_edge
    }

    pub fn cell_dofs(&self, cell: usize) -> std::ops::Range<usize> {
        let start = self.cell_offset + cell * self.per_cell;
        start..start + self.per_cell
    }

    /// Local-to-global links of `cell`, in the element's canonical local order.
    pub fn links(&self, cell: usize) -> &[DofLink] {
        &self.links[cell]
    }

    pub fn num_cells(&self) -> usize {
        self.links.len()
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.boundary[dof]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    /// Unconstrained dofs, ascending.
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn num_free(&self) -> usize {
        self.free.len()
    }

    /// `x_K` from a global vector.
    pub fn gather(&self, cell: usize, global: &[f64]) -> Vec<f64> {
        self.links[cell].iter().map(|l| l.factor() * global[l.global]).collect()
    }
}
