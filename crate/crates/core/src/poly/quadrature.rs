//! Gauss rules on intervals, triangles and star-shaped polygons.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{EdgeFrame, Point, Polygon};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Number of Gauss points exact for polynomials of degree `degree`.
pub fn points_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}

/// 1D rule on the local edge coordinate `s ∈ [-1/2, 1/2]` (weights sum to 1).
#[derive(Clone, Debug)]
pub struct LineRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineRule {
    pub fn exact_to(degree: usize) -> Self {
        let (x, w) = gauss_legendre(points_for_degree(degree));
        Self {
            points: x.iter().map(|t| 0.5 * t).collect(),
            weights: w.iter().map(|w| 0.5 * w).collect(),
        }
    }

    /// `∫_e f` for `f` given as a function of the local coordinate.
    pub fn integrate_edge(&self, edge: &EdgeFrame, mut f: impl FnMut(f64, Point) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * f(s, edge.point_at(s)))
            .sum::<f64>()
            * edge.length
    }
}

/// Weighted points in the plane.
#[derive(Clone, Debug, Default)]
pub struct Quadrature {
    pub points: Vec<(Point, f64)>,
    pub exactness: usize,
}

impl Quadrature {
    /// Collapsed-square (Duffy) product rule on the triangle `abc`, exact to `degree`.
    /// Weights carry the signed area, so clockwise triangles give negative weights.
    pub fn triangle(a: Point, b: Point, c: Point, degree: usize) -> Self {
        let n = points_for_degree(degree + 1);
        let (x, w) = gauss_legendre(n);
        let twice_area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        let mut points = Vec::with_capacity(n * n);
        for (xu, wu) in x.iter().zip(&w) {
            let u = 0.5 * (xu + 1.0);
            for (xv, wv) in x.iter().zip(&w) {
                let v = 0.5 * (xv + 1.0);
                let p = a + ((b - a) + (c - b) * v) * u;
                points.push((p, 0.25 * wu * wv * u * twice_area));
            }
        }
        Self {
            points,
            exactness: degree,
        }
    }

    /// Fan sub-triangulation from the centroid, exact to `degree`.
    pub fn polygon(polygon: &Polygon, degree: usize) -> Self {
        let c = polygon.centroid();
        let mut points = Vec::new();
        for (a, b) in polygon.edges() {
            points.extend(Self::triangle(c, a, b, degree).points);
        }
        Self {
            points,
            exactness: degree,
        }
    }

    pub fn integrate(&self, mut f: impl FnMut(Point) -> f64) -> f64 {
        self.points.iter().map(|&(p, w)| w * f(p)).sum()
    }
}

/// `∫_K f` for a function exactly integrable at degree `degree`.
pub fn integrate_polygon_fn(
    polygon: &Polygon,
    degree: usize,
    f: impl FnMut(Point) -> f64,
) -> Result<f64> {
    let h = polygon.diameter();
    if !(polygon.area() > 1e-14 * h * h) {
        return Err(Error::DegenerateGeometry(format!(
            "polygon area {:e} below threshold",
            polygon.area()
        )));
    }
    Ok(Quadrature::polygon(polygon, degree).integrate(f))
}
