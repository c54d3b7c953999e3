//! Polygonal meshes with globally oriented edges.
//!
//! Each edge is stored once with `start < end` (vertex indices). A cell's
//! counterclockwise loop traverses its edge `j` from loop vertex `j` to `j + 1`;
//! the incidence sign is `+1` when that agrees with the global orientation.
//! Because the edge normal is the clockwise rotation of the tangent, the sign
//! is also `ν_{K,e} · ν_e`.

mod generate;
mod io;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{EdgeFrame, Point, Polygon};

pub use generate::{make_grid, make_grid_seeded, MeshKind, DEFAULT_SEED};
pub use io::{format_f64, load_mesh, mesh_from_json, mesh_to_json, save_mesh};

/// Edge of one cell, expressed in the global edge frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellEdge {
    pub frame: EdgeFrame,
    /// `+1` if the cell traverses the edge from `frame.start` to `frame.end`.
    pub sign: f64,
    /// Local (loop) index of the vertex at `frame.start`.
    pub start_local: usize,
    /// Local (loop) index of the vertex at `frame.end`.
    pub end_local: usize,
}

/// Geometry of one cell as needed by the element pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct CellGeometry {
    pub polygon: Polygon,
    pub edges: Vec<CellEdge>,
}

impl CellGeometry {
    /// Standalone cell: edge orientation follows the local vertex numbering, so
    /// the closing edge `(n-1, 0)` is traversed against its global direction.
    pub fn from_polygon(polygon: Polygon) -> Result<Self> {
        let n = polygon.len();
        let ids: Vec<usize> = (0..n).collect();
        Self::with_vertex_ids(polygon, &ids)
    }

    /// Cell whose loop vertices carry the given global ids.
    pub fn with_vertex_ids(polygon: Polygon, ids: &[usize]) -> Result<Self> {
        let n = polygon.len();
        let v = polygon.vertices();
        let mut edges = Vec::with_capacity(n);
        for j in 0..n {
            let jn = (j + 1) % n;
            let (start_local, end_local, sign) = if ids[j] < ids[jn] {
                (j, jn, 1.0)
            } else {
                (jn, j, -1.0)
            };
            edges.push(CellEdge {
                frame: EdgeFrame::new(v[start_local], v[end_local])?,
                sign,
                start_local,
                end_local,
            });
        }
        Ok(Self { polygon, edges })
    }

    pub fn vertices(&self) -> &[Point] {
        self.polygon.vertices()
    }

    pub fn num_vertices(&self) -> usize {
        self.polygon.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn centroid(&self) -> Point {
        self.polygon.centroid()
    }

    pub fn diameter(&self) -> f64 {
        self.polygon.diameter()
    }

    pub fn area(&self) -> f64 {
        self.polygon.area()
    }

    /// Copy with the loop rotated to start at loop vertex `shift`.
    pub fn rotated(&self, shift: usize) -> Result<Self> {
        let n = self.num_vertices();
        let verts: Vec<Point> = (0..n).map(|i| self.vertices()[(i + shift) % n]).collect();
        // keep the same global orientation of every edge
        let ids: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        Self::with_vertex_ids(Polygon::new(verts)?, &ids)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyMesh {
    vertices: Vec<Point>,
    edges: Vec<[usize; 2]>,
    cells: Vec<Vec<usize>>,
    /// per cell, per loop edge: (global edge, sign)
    cell_edges: Vec<Vec<(usize, f64)>>,
    edge_cells: Vec<Vec<usize>>,
    boundary_vertex: Vec<bool>,
    boundary_edge: Vec<bool>,
}

impl PolyMesh {
    /// Builds and validates a mesh from vertex coordinates and counterclockwise cell loops.
    pub fn new(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mesh = Self::build_topology(vertices, cells)?;
        let report = validate_star_shaped(&mesh);
        if let Some(c) = report.per_cell.iter().position(|ok| !ok) {
            return Err(Error::MeshValidation(format!(
                "cell {c} is not star-shaped with respect to its centroid"
            )));
        }
        Ok(mesh)
    }

    fn build_topology(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::MeshValidation("mesh has no cells".into()));
        }
        check_duplicate_vertices(&vertices)?;
        let mut edge_map: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() < 3 {
                return Err(Error::MeshValidation(format!(
                    "cell {c} has {} vertices",
                    cell.len()
                )));
            }
            for (j, &v) in cell.iter().enumerate() {
                if v >= vertices.len() {
                    return Err(Error::MeshValidation(format!(
                        "cell {c} references vertex {v} out of range"
                    )));
                }
                if cell[..j].contains(&v) {
                    return Err(Error::MeshValidation(format!(
                        "cell {c} repeats vertex {v}"
                    )));
                }
            }
            let polygon = Polygon::new(cell.iter().map(|&v| vertices[v]).collect())
                .map_err(|e| Error::MeshValidation(format!("cell {c}: {e}")))?;
            if polygon.is_self_intersecting() {
                return Err(Error::MeshValidation(format!(
                    "cell {c} is not a simple polygon"
                )));
            }
            for j in 0..cell.len() {
                let a = cell[j];
                let b = cell[(j + 1) % cell.len()];
                edge_map
                    .entry((a.min(b), a.max(b)))
                    .or_default()
                    .push((c, a < b));
            }
        }

        let mut edges = Vec::with_capacity(edge_map.len());
        let mut edge_cells = Vec::with_capacity(edge_map.len());
        let mut index = BTreeMap::new();
        for (&(a, b), uses) in &edge_map {
            match uses.as_slice() {
                [_] => {}
                [(_, d0), (_, d1)] if d0 != d1 => {}
                [_, _] => {
                    return Err(Error::MeshValidation(format!(
                        "edge ({a}, {b}) traversed in the same direction by both cells"
                    )))
                }
                _ => {
                    return Err(Error::MeshValidation(format!(
                        "edge ({a}, {b}) shared by {} cells",
                        uses.len()
                    )))
                }
            }
            index.insert((a, b), edges.len());
            edges.push([a, b]);
            edge_cells.push(uses.iter().map(|u| u.0).collect::<Vec<_>>());
        }

        let cell_edges = cells
            .iter()
            .map(|cell| {
                (0..cell.len())
                    .map(|j| {
                        let a = cell[j];
                        let b = cell[(j + 1) % cell.len()];
                        let e = index[&(a.min(b), a.max(b))];
                        (e, if a < b { 1.0 } else { -1.0 })
                    })
                    .collect()
            })
            .collect();

        let mut boundary_vertex = vec![false; vertices.len()];
        let boundary_edge: Vec<bool> = edge_cells.iter().map(|c| c.len() == 1).collect();
        for (e, &[a, b]) in edges.iter().enumerate() {
            if boundary_edge[e] {
                boundary_vertex[a] = true;
                boundary_vertex[b] = true;
            }
        }
        let used: Vec<bool> = {
            let mut u = vec![false; vertices.len()];
            cells.iter().flatten().for_each(|&v| u[v] = true);
            u
        };
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::MeshValidation(format!(
                "vertex {v} is not used by any cell"
            )));
        }

        Ok(Self {
            vertices,
            edges,
            cells,
            cell_edges,
            edge_cells,
            boundary_vertex,
            boundary_edge,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// `(global edge, sign)` for each loop edge of `cell`.
    pub fn cell_edges(&self, cell: usize) -> &[(usize, f64)] {
        &self.cell_edges[cell]
    }

    pub fn edge_cells(&self, edge: usize) -> &[usize] {
        &self.edge_cells[edge]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edge[e]
    }

    pub fn edge_frame(&self, e: usize) -> EdgeFrame {
        let [a, b] = self.edges[e];
        EdgeFrame::new(self.vertices[a], self.vertices[b]).expect("validated mesh edge")
    }

    pub fn cell_polygon(&self, cell: usize) -> Polygon {
        Polygon::new(self.cells[cell].iter().map(|&v| self.vertices[v]).collect())
            .expect("validated mesh cell")
    }

    pub fn cell_geometry(&self, cell: usize) -> CellGeometry {
        CellGeometry::with_vertex_ids(self.cell_polygon(cell), &self.cells[cell])
            .expect("validated mesh cell")
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_cells())
            .map(|c| self.cell_polygon(c).area())
            .sum()
    }

    /// `V - E + C`.
    pub fn euler_characteristic(&self) -> isize {
        self.num_vertices() as isize - self.num_edges() as isize + self.num_cells() as isize
    }

    /// Largest cell diameter.
    pub fn mesh_size(&self) -> f64 {
        (0..self.num_cells())
            .map(|c| self.cell_polygon(c).diameter())
            .fold(0.0, f64::max)
    }
}

fn check_duplicate_vertices(vertices: &[Point]) -> Result<()> {
    if vertices.is_empty() {
        return Err(Error::MeshValidation("mesh has no vertices".into()));
    }
    let (mut lo, mut hi) = (vertices[0], vertices[0]);
    for p in vertices {
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(Error::MeshValidation("non-finite vertex coordinate".into()));
        }
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let tol = 1e-12 * (hi - lo).norm();
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&a, &b| vertices[a].x.total_cmp(&vertices[b].x));
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            if vertices[b].x - vertices[a].x > tol {
                break;
            }
            if (vertices[b] - vertices[a]).norm() <= tol {
                return Err(Error::MeshValidation(format!(
                    "vertices {} and {} coincide",
                    a.min(b),
                    a.max(b)
                )));
            }
        }
    }
    Ok(())
}

/// Per-cell star-shapedness with respect to the centroid.
#[derive(Clone, Debug, PartialEq)]
pub struct StarReport {
    pub per_cell: Vec<bool>,
    /// `min_K (distance from centroid to the nearest edge line) / h_K`.
    pub min_chunkiness: f64,
}

impl StarReport {
    pub fn all_star_shaped(&self) -> bool {
        self.per_cell.iter().all(|&b| b)
    }
}

pub fn validate_star_shaped(mesh: &PolyMesh) -> StarReport {
    let mut per_cell = Vec::with_capacity(mesh.num_cells());
    let mut min_chunkiness = f64::INFINITY;
    for c in 0..mesh.num_cells() {
        let p = mesh.cell_polygon(c);
        per_cell.push(p.is_star_shaped_wrt_centroid());
        min_chunkiness = min_chunkiness.min(p.centroid_margin() / p.diameter());
    }
    StarReport {
        per_cell,
        min_chunkiness,
    }
}
