//! Structured meshes of the unit square.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PolyMesh;
use crate::error::{Error, Result};
use crate::geometry::{Point, Vector};

pub const DEFAULT_SEED: u64 = 0x5eed;

const MAX_RETRIES: u32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshKind {
    Squares,
    Triangles,
    /// Staggered brick layout: hexagons with a midpoint on the top and bottom
    /// edges, closed off by quadrilaterals at the left and right walls.
    PolygonsPerturbed,
}

impl MeshKind {
    pub const ALL: [MeshKind; 3] = [Self::Squares, Self::Triangles, Self::PolygonsPerturbed];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Squares => "squares",
            Self::Triangles => "triangles",
            Self::PolygonsPerturbed => "polygons-perturbed",
        }
    }
}

impl fmt::Display for MeshKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeshKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown mesh kind '{s}'")))
    }
}

/// [`make_grid_seeded`] with [`DEFAULT_SEED`].
pub fn make_grid(kind: MeshKind, n: usize, perturb: f64) -> Result<PolyMesh> {
    make_grid_seeded(kind, n, perturb, DEFAULT_SEED)
}

/// Mesh of `[0, 1]²` with `n` cells per direction. Interior vertices move by at
/// most `perturb / n`; a tangled result is retried with half the magnitude.
pub fn make_grid_seeded(kind: MeshKind, n: usize, perturb: f64, seed: u64) -> Result<PolyMesh> {
    if n == 0 {
        return Err(Error::Parameter("grid size N must be at least 1".into()));
    }
    if !(0.0..=0.3).contains(&perturb) {
        return Err(Error::Parameter(format!(
            "perturbation {perturb} outside [0, 0.3]"
        )));
    }
    let (vertices, cells) = match kind {
        MeshKind::Squares => squares(n),
        MeshKind::Triangles => triangles(n),
        MeshKind::PolygonsPerturbed => bricks(n),
    };
    if perturb == 0.0 {
        return PolyMesh::new(vertices, cells);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = perturb / n as f64;
    let shifts: Vec<Vector> = vertices
        .iter()
        .map(|p| {
            let interior = p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0;
            // draw for every vertex so the stream does not depend on the layout
            let r = radius * rng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            if interior {
                Vector::new(r * theta.cos(), r * theta.sin())
            } else {
                Vector::zeros()
            }
        })
        .collect();

    let mut last = None;
    for attempt in 0..=MAX_RETRIES {
        let factor = 0.5f64.powi(attempt as i32);
        let moved = vertices
            .iter()
            .zip(&shifts)
            .map(|(p, d)| p + d * factor)
            .collect();
        match PolyMesh::new(moved, cells.clone()) {
            Ok(mesh) => return Ok(mesh),
            Err(e @ Error::MeshValidation(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(Error::MeshGeneration(format!(
        "{kind} mesh with N = {n} still tangled after {MAX_RETRIES} retries: {}",
        last.expect("at least one attempt")
    )))
}

fn lattice(n: usize) -> Vec<Point> {
    let h = 1.0 / n as f64;
    (0..=n)
        .flat_map(|j| (0..=n).map(move |i| Point::new(i as f64 * h, j as f64 * h)))
        .collect()
}

fn squares(n: usize) -> (Vec<Point>, Vec<Vec<usize>>) {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let cells = (0..n)
        .flat_map(|j| (0..n).map(move |i| vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]))
        .collect();
    (lattice(n), cells)
}

fn triangles(n: usize) -> (Vec<Point>, Vec<Vec<usize>>) {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            cells.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    (lattice(n), cells)
}

/// Corner positions of row `r` in units of `1 / (2n)`.
fn row_corners(n: usize, r: usize) -> Vec<usize> {
    if r % 2 == 0 {
        (0..=n).map(|i| 2 * i).collect()
    } else {
        std::iter::once(0)
            .chain((0..n).map(|i| 2 * i + 1))
            .chain(std::iter::once(2 * n))
            .collect()
    }
}

fn bricks(n: usize) -> (Vec<Point>, Vec<Vec<usize>>) {
    let h = 1.0 / n as f64;
    // x positions present on each horizontal line
    let lines: Vec<Vec<usize>> = (0..=n)
        .map(|j| {
            let mut xs = Vec::new();
            if j > 0 {
                xs.extend(row_corners(n, j - 1));
            }
            if j < n {
                xs.extend(row_corners(n, j));
            }
            xs.sort_unstable();
            xs.dedup();
            xs
        })
        .collect();
    let mut vertices = Vec::new();
    let mut ids: Vec<Vec<(usize, usize)>> = Vec::with_capacity(n + 1);
    for (j, xs) in lines.iter().enumerate() {
        ids.push(
            xs.iter()
                .map(|&x| {
                    vertices.push(Point::new(x as f64 * 0.5 * h, j as f64 * h));
                    (x, vertices.len() - 1)
                })
                .collect(),
        );
    }
    let mut cells = Vec::new();
    for r in 0..n {
        for w in row_corners(n, r).windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut cell: Vec<usize> = ids[r]
                .iter()
                .filter(|(x, _)| (a..=b).contains(x))
                .map(|&(_, v)| v)
                .collect();
            cell.extend(
                ids[r + 1]
                    .iter()
                    .rev()
                    .filter(|(x, _)| (a..=b).contains(x))
                    .map(|&(_, v)| v),
            );
            cells.push(cell);
        }
    }
    (vertices, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::validate_star_shaped;

    #[test]
    fn squares_counts() {
        let m = make_grid(MeshKind::Squares, 4, 0.0).unwrap();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_cells()), (25, 40, 16));
    }

    #[test]
    fn single_triangle_pair() {
        let m = make_grid(MeshKind::Triangles, 1, 0.0).unwrap();
        assert_eq!(m.num_cells(), 2);
    }

    #[test]
    fn perturbed_squares_star_shaped() {
        let m = make_grid(MeshKind::Squares, 8, 0.2).unwrap();
        let r = validate_star_shaped(&m);
        assert!(r.all_star_shaped());
        assert_eq!(r.per_cell.len(), 64);
    }

    #[test]
    fn brick_layout_cells() {
        let m = make_grid(MeshKind::PolygonsPerturbed, 4, 0.0).unwrap();
        let sizes: Vec<usize> = m.cells().iter().map(Vec::len).collect();
        // pentagons along the top and bottom walls, quadrilaterals at the side walls
        assert_eq!(sizes.iter().filter(|&&s| s == 6).count(), 7);
        assert_eq!(sizes.iter().filter(|&&s| s == 4).count(), 4);
        assert!(sizes.iter().all(|&s| (4..=6).contains(&s)));
        assert!((m.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invariants_all_kinds() {
        for kind in MeshKind::ALL {
            for n in [1, 2, 3, 5, 8] {
                for perturb in [0.0, 0.1, 0.3] {
                    let m = make_grid_seeded(kind, n, perturb, 7).unwrap();
                    assert!((m.total_area() - 1.0).abs() < 1e-12, "{kind} {n} {perturb}");
                    assert_eq!(m.euler_characteristic(), 1);
                    assert!(validate_star_shaped(&m).all_star_shaped());
                }
            }
        }
    }

    #[test]
    fn displacement_bounded() {
        let n = 6;
        let base = make_grid(MeshKind::PolygonsPerturbed, n, 0.0).unwrap();
        let moved = make_grid_seeded(MeshKind::PolygonsPerturbed, n, 0.3, 11).unwrap();
        for (a, b) in base.vertices().iter().zip(moved.vertices()) {
            assert!((a - b).norm() <= 0.3 / n as f64 + 1e-15);
            let on_boundary = a.x == 0.0 || a.x == 1.0 || a.y == 0.0 || a.y == 1.0;
            if on_boundary {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let a = make_grid_seeded(MeshKind::Squares, 5, 0.2, 3).unwrap();
        let b = make_grid_seeded(MeshKind::Squares, 5, 0.2, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_parameters() {
        assert!(make_grid(MeshKind::Squares, 0, 0.0).is_err());
        assert!(make_grid(MeshKind::Squares, 2, 0.5).is_err());
        assert_eq!("polygons-perturbed".parse::<MeshKind>().unwrap(), MeshKind::PolygonsPerturbed);
        assert!("hexagons".parse::<MeshKind>().is_err());
    }
}
