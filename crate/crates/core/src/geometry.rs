//! Planar polygon and edge geometry.

use nalgebra::{Point2, Vector2};

use crate::error::{Error, Result};

pub type Point = Point2<f64>;
pub type Vector = Vector2<f64>;

/// Straight edge with its tangent/normal frame.
///
/// The tangent points from `start` to `end`, the normal is the tangent rotated
/// clockwise: `normal = (t_y, -t_x)`. For a counterclockwise polygon traversing
/// the edge from `start` to `end` this is the outward normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeFrame {
    pub start: Point,
    pub end: Point,
    pub tangent: Vector,
    pub normal: Vector,
    pub midpoint: Point,
    pub length: f64,
}

impl EdgeFrame {
    pub fn new(start: Point, end: Point) -> Result<Self> {
        let d = end - start;
        let length = d.norm();
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::DegenerateGeometry(format!(
                "zero-length edge at ({}, {})",
                start.x, start.y
            )));
        }
        let tangent = d / length;
        Ok(Self {
            start,
            end,
            tangent,
            normal: Vector::new(tangent.y, -tangent.x),
            midpoint: Point::from((start.coords + end.coords) * 0.5),
            length,
        })
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.end, self.start).expect("edge already validated")
    }

    /// Point at local coordinate `s = (x - midpoint)·t / |e|`, `s ∈ [-1/2, 1/2]`.
    pub fn point_at(&self, s: f64) -> Point {
        self.midpoint + self.tangent * (s * self.length)
    }
}

/// Simple polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
    area: f64,
    centroid: Point,
    diameter: f64,
}

impl Polygon {
    /// Builds a polygon, rejecting fewer than 3 vertices and non-positive area.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateGeometry(format!(
                "polygon with {} vertices",
                vertices.len()
            )));
        }
        let (area, centroid) = area_centroid(&vertices);
        let diameter = diameter(&vertices);
        if !(area > 1e-14 * diameter * diameter) {
            return Err(Error::DegenerateGeometry(format!(
                "polygon area {area:e} not positive (diameter {diameter:e})"
            )));
        }
        Ok(Self {
            vertices,
            area,
            centroid,
            diameter,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn centroid(&self) -> Point {
        self.centroid
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Edges in counterclockwise order, edge `i` from vertex `i` to `i + 1`.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Smallest signed distance from the centroid to the lines of the edges.
    /// Positive iff the centroid is strictly inside every edge's inner half-plane.
    pub fn centroid_margin(&self) -> f64 {
        self.edges()
            .map(|(a, b)| {
                let t = (b - a).normalize();
                let inward = Vector::new(-t.y, t.x);
                (self.centroid - a).dot(&inward)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Star-shaped with respect to the centroid, with margin `1e-10 h`.
    pub fn is_star_shaped_wrt_centroid(&self) -> bool {
        self.centroid_margin() >= 1e-10 * self.diameter
    }

    /// Whether any two non-adjacent edges intersect.
    pub fn is_self_intersecting(&self) -> bool {
        let n = self.vertices.len();
        let edges: Vec<_> = self.edges().collect();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                if segments_intersect(edges[i].0, edges[i].1, edges[j].0, edges[j].1) {
                    return true;
                }
            }
        }
        false
    }

    pub fn translated_scaled(&self, shift: Vector, factor: f64) -> Result<Polygon> {
        Polygon::new(
            self.vertices
                .iter()
                .map(|p| Point::from(p.coords * factor + shift))
                .collect(),
        )
    }
}

pub fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
        * 0.5
}

fn area_centroid(vertices: &[Point]) -> (f64, Point) {
    // shoelace relative to the first vertex for accuracy away from the origin
    let o = vertices[0];
    let n = vertices.len();
    let mut a2 = 0.0;
    let mut c = Vector::zeros();
    for i in 1..n - 1 {
        let p = vertices[i] - o;
        let q = vertices[i + 1] - o;
        let cross = p.x * q.y - q.x * p.y;
        a2 += cross;
        c += (p + q) * cross;
    }
    let area = a2 * 0.5;
    if a2 == 0.0 {
        return (0.0, o);
    }
    (area, o + c / (3.0 * a2))
}

fn diameter(vertices: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            d = d.max((b - a).norm());
        }
    }
    d
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(c: &[(f64, f64)]) -> Vec<Point> {
        c.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn unit_square_geometry() {
        let p = Polygon::new(pts(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)])).unwrap();
        assert!((p.area() - 1.0).abs() < 1e-15);
        assert!((p.centroid() - Point::new(0.5, 0.5)).norm() < 1e-15);
        assert!((p.diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert!(p.is_star_shaped_wrt_centroid());
        assert!(!p.is_self_intersecting());
    }

    #[test]
    fn clockwise_rejected() {
        assert!(Polygon::new(pts(&[(0., 0.), (0., 1.), (1., 1.), (1., 0.)])).is_err());
    }

    #[test]
    fn bowtie_self_intersects() {
        // signed area zero, so build the vertex list directly
        let v = pts(&[(0., 0.), (1., 1.), (1., 0.), (0., 1.)]);
        let n = v.len();
        let mut hit = false;
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                hit |= segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]);
            }
        }
        assert!(hit);
    }

    #[test]
    fn edge_frame_orientation() {
        let e = EdgeFrame::new(Point::new(0., 0.), Point::new(2., 0.)).unwrap();
        assert_eq!(e.normal, Vector::new(0., -1.));
        assert_eq!(e.length, 2.0);
        assert!((e.point_at(0.5) - Point::new(2., 0.)).norm() < 1e-15);
        assert!(EdgeFrame::new(Point::new(1., 1.), Point::new(1., 1.)).is_err());
    }
}
