//! Fixed test polygons for the element checks.

use crate::geometry::{Point, Polygon};
use crate::mesh::CellGeometry;

fn cell(points: &[(f64, f64)]) -> CellGeometry {
    let polygon = Polygon::new(points.iter().map(|&(x, y)| Point::new(x, y)).collect())
        .expect("zoo polygon is valid");
    CellGeometry::from_polygon(polygon).expect("zoo polygon has no zero-length edges")
}

/// Triangle, unit square, regular pentagon, perturbed hexagon and a 10:1 quadrilateral.
pub fn polygon_zoo() -> Vec<(&'static str, CellGeometry)> {
    let pentagon: Vec<(f64, f64)> = (0..5)
        .map(|i| {
            let t = std::f64::consts::FRAC_PI_2 + i as f64 * std::f64::consts::TAU / 5.0;
            (t.cos(), t.sin())
        })
        .collect();
    let hexagon: Vec<(f64, f64)> = (0..6)
        .map(|i| {
            let t = i as f64 * std::f64::consts::TAU / 6.0;
            let r = [1.0, 0.93, 1.08, 0.97, 1.04, 0.9][i];
            let dt = [0.0, 0.05, -0.04, 0.03, -0.06, 0.02][i];
            (r * (t + dt).cos(), r * (t + dt).sin())
        })
        .collect();
    vec![
        ("triangle", cell(&[(0.0, 0.0), (1.0, 0.0), (0.3, 0.8)])),
        ("unit-square", cell(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])),
        ("regular-pentagon", cell(&pentagon)),
        ("perturbed-hexagon", cell(&hexagon)),
        ("thin-quad", cell(&[(0.0, 0.0), (1.0, 0.0), (0.98, 0.1), (0.03, 0.1)])),
    ]
}
