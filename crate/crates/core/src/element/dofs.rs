//! Scalar fields and the degree-of-freedom functionals applied to them.

use nalgebra::DVector;

use super::layout::{DofKind, DofLayout};
use crate::geometry::{Point, Vector};
use crate::poly::{directional_weights, CellMoments, LineRule, MultiIndex, Polynomial, Quadrature};

/// Exactness degree, beyond the polynomial weight, for fields known only pointwise.
pub const ANALYTIC_QUADRATURE_DEGREE: usize = 20;

/// A smooth function with pointwise access to its partial derivatives.
pub trait ScalarField: Sync {
    fn name(&self) -> &str {
        "field"
    }

    /// `∂^α u(x)`.
    fn derivative(&self, alpha: MultiIndex, x: Point) -> f64;

    fn value(&self, x: Point) -> f64 {
        self.derivative(MultiIndex::ZERO, x)
    }

    /// `Some` when the field is a polynomial and may be handled exactly.
    fn as_polynomial(&self) -> Option<&Polynomial> {
        None
    }

    /// `(d·∇)^order u(x)`.
    fn directional(&self, dir: Vector, order: usize, x: Point) -> f64 {
        directional_weights(&[(dir, order)])
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(c, w)| w * self.derivative(MultiIndex::new(c, order - c), x))
            .sum()
    }
}

impl ScalarField for Polynomial {
    fn name(&self) -> &str {
        "polynomial"
    }

    fn derivative(&self, alpha: MultiIndex, x: Point) -> f64 {
        if alpha == MultiIndex::ZERO {
            self.evaluate(x)
        } else {
            self.derive(alpha).evaluate(x)
        }
    }

    fn as_polynomial(&self) -> Option<&Polynomial> {
        Some(self)
    }
}

/// The zero function.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroField;

impl ScalarField for ZeroField {
    fn name(&self) -> &str {
        "zero"
    }

    fn derivative(&self, _: MultiIndex, _: Point) -> f64 {
        0.0
    }
}

/// Largest relative mismatch between each derivative callback of order
/// `1..=max_order` and a central difference of the next lower one.
pub fn finite_difference_mismatch(
    field: &dyn ScalarField,
    points: &[Point],
    max_order: usize,
    step: f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for &x in points {
        for order in 1..=max_order {
            for c in 0..=order {
                let alpha = MultiIndex::new(c, order - c);
                let (lower, dir) = if c > 0 {
                    (MultiIndex::new(c - 1, order - c), Vector::new(step, 0.0))
                } else {
                    (MultiIndex::new(0, order - 1), Vector::new(0.0, step))
                };
                let fd = (field.derivative(lower, x + dir) - field.derivative(lower, x - dir))
                    / (2.0 * step);
                let exact = field.derivative(alpha, x);
                let scale = exact.abs().max(field.derivative(lower, x).abs()).max(1.0);
                worst = worst.max((fd - exact).abs() / scale);
            }
        }
    }
    worst
}

/// `∫_{-1/2}^{1/2} s^n ds`.
pub(crate) fn centered_power_integral(n: usize) -> f64 {
    if n % 2 == 1 {
        0.0
    } else {
        0.5f64.powi(n as i32) / (n + 1) as f64
    }
}

/// Applies all dofs of one element, reusing cell moments across calls.
pub struct DofEvaluator<'a> {
    layout: &'a DofLayout,
    moments: CellMoments,
}

impl<'a> DofEvaluator<'a> {
    pub fn new(layout: &'a DofLayout) -> crate::Result<Self> {
        let moments = CellMoments::new(&layout.geometry().polygon, 2 * layout.k())?;
        Ok(Self { layout, moments })
    }

    pub fn with_moments(layout: &'a DofLayout, moments: CellMoments) -> Self {
        Self { layout, moments }
    }

    pub fn moments(&self) -> &CellMoments {
        &self.moments
    }

    pub fn evaluate(&self, field: &dyn ScalarField) -> DVector<f64> {
        match field.as_polynomial() {
            Some(p) => self.evaluate_polynomial(p),
            None => self.evaluate_analytic(field),
        }
    }

    /// Exact dofs of a polynomial given in any frame.
    pub fn evaluate_polynomial(&self, p: &Polynomial) -> DVector<f64> {
        let layout = self.layout;
        let p = p.reframe(layout.frame());
        let geometry = layout.geometry();
        let needed = p.degree() as isize + layout.interior_degree();
        let local_moments;
        let moments = if needed > self.moments.degree() as isize {
            local_moments = CellMoments::new(&geometry.polygon, needed as usize)
                .expect("layout polygon is valid");
            &local_moments
        } else {
            &self.moments
        };
        let mut out = DVector::zeros(layout.len());
        let n_vertex = layout.per_vertex();
        // vertex derivatives are shared by all vertices
        let partials: Vec<Polynomial> = (0..n_vertex)
            .map(|pos| p.derive(MultiIndex::from_position(pos)))
            .collect();
        for (i, d) in layout.descriptors().iter().enumerate() {
            out[i] = match d.kind {
                DofKind::Vertex { vertex, alpha } => {
                    d.scale * partials[alpha.position()].evaluate(geometry.vertices()[vertex])
                }
                DofKind::Edge { .. } => continue,
                DofKind::Interior { alpha } => {
                    d.scale * moments.inner(&p, &Polynomial::monomial(layout.frame(), alpha))
                }
            };
        }
        for (e, ce) in geometry.edges.iter().enumerate() {
            for a in 0..layout.m() {
                let n = layout.edge_moments(a);
                if n == 0 {
                    continue;
                }
                let q = p.directional_derivative(ce.frame.normal, a).restrict_to_edge(&ce.frame);
                let scale = ce.frame.length.powi(a as i32 - 1) * ce.frame.length;
                for i in 0..n {
                    let integral: f64 = q
                        .coeffs()
                        .iter()
                        .enumerate()
                        .map(|(j, c)| c * centered_power_integral(i + j))
                        .sum();
                    out[layout.edge_dof(e, a, i)] = scale * integral;
                }
            }
        }
        out
    }

    /// Dofs by quadrature of exactness `ANALYTIC_QUADRATURE_DEGREE + k`.
    pub fn evaluate_analytic(&self, field: &dyn ScalarField) -> DVector<f64> {
        let layout = self.layout;
        let geometry = layout.geometry();
        let degree = ANALYTIC_QUADRATURE_DEGREE + layout.k();
        let line = LineRule::exact_to(degree);
        let mut out = DVector::zeros(layout.len());
        for (i, d) in layout.descriptors().iter().enumerate() {
            if let DofKind::Vertex { vertex, alpha } = d.kind {
                out[i] = d.scale * field.derivative(alpha, geometry.vertices()[vertex]);
            }
        }
        for (e, ce) in geometry.edges.iter().enumerate() {
            for a in 0..layout.m() {
                let n = layout.edge_moments(a);
                if n == 0 {
                    continue;
                }
                let mut acc = vec![0.0; n];
                for (&s, &w) in line.points.iter().zip(&line.weights) {
                    let v = w * field.directional(ce.frame.normal, a, ce.frame.point_at(s));
                    let mut sp = 1.0;
                    for slot in acc.iter_mut() {
                        *slot += v * sp;
                        sp *= s;
                    }
                }
                let scale = ce.frame.length.powi(a as i32);
                for (i, v) in acc.into_iter().enumerate() {
                    out[layout.edge_dof(e, a, i)] = scale * v;
                }
            }
        }
        if layout.num_interior() > 0 {
            let quad = Quadrature::polygon(&geometry.polygon, degree);
            let frame = layout.frame();
            let n_int = layout.num_interior();
            let mut acc = vec![0.0; n_int];
            for &(x, w) in &quad.points {
                let v = w * field.value(x);
                let xl = frame.local(x);
                for (pos, slot) in acc.iter_mut().enumerate() {
                    let alpha = MultiIndex::from_position(pos);
                    *slot += v * xl.x.powi(alpha.x as i32) * xl.y.powi(alpha.y as i32);
                }
            }
            let start = layout.num_boundary();
            for (pos, v) in acc.into_iter().enumerate() {
                out[start + pos] = v / layout.area();
            }
        }
        out
    }
}

/// `χ(field)`, the full local dof vector.
pub fn dof_evaluate(layout: &DofLayout, field: &dyn ScalarField) -> crate::Result<DVector<f64>> {
    Ok(DofEvaluator::new(layout)?.evaluate(field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::layout::dof_layout;
    use crate::geometry::Polygon;
    use crate::mesh::CellGeometry;
    use crate::poly::{basis_size, ScaledFrame};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pentagon() -> CellGeometry {
        CellGeometry::from_polygon(
            Polygon::new(vec![
                Point::new(0.1, 0.0),
                Point::new(1.0, 0.2),
                Point::new(1.2, 0.9),
                Point::new(0.5, 1.3),
                Point::new(-0.2, 0.7),
            ])
            .unwrap(),
        )
        .unwrap()
    }

    /// A polynomial hidden behind the pointwise interface.
    struct Opaque(Polynomial);

    impl ScalarField for Opaque {
        fn derivative(&self, alpha: MultiIndex, x: Point) -> f64 {
            self.0.derivative(alpha, x)
        }
    }

    #[test]
    fn constant_field() {
        let l = dof_layout(&pentagon(), 3, 6).unwrap();
        let one = Polynomial::monomial(ScaledFrame::new(Point::origin(), 1.0), MultiIndex::ZERO);
        let chi = dof_evaluate(&l, &one).unwrap();
        for (i, d) in l.descriptors().iter().enumerate() {
            let expected = match d.kind {
                DofKind::Vertex { alpha, .. } => (alpha.order() == 0) as u8 as f64,
                DofKind::Edge { normal_order, moment, .. } => {
                    (normal_order == 0 && moment == 0) as u8 as f64
                }
                DofKind::Interior { alpha } => (alpha.order() == 0) as u8 as f64,
            };
            assert!((chi[i] - expected).abs() < 1e-13, "dof {i}: {} vs {expected}", chi[i]);
        }
    }

    #[test]
    fn unscaled_vertex_dofs_are_gradients() {
        let l = dof_layout(&pentagon(), 4, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = ScaledFrame::new(Point::new(0.5, 0.5), 1.0);
        let p = Polynomial::from_coeffs(f, 5, (0..21).map(|_| rng.random_range(-1.0..1.0)).collect());
        let chi = dof_evaluate(&l, &p).unwrap();
        let h = l.diameter();
        for (v, x) in l.geometry().vertices().iter().enumerate() {
            let gx = chi[l.vertex_dof(v, MultiIndex::new(1, 0))] / h;
            let gy = chi[l.vertex_dof(v, MultiIndex::new(0, 1))] / h;
            assert!((gx - p.derive(MultiIndex::new(1, 0)).evaluate(*x)).abs() < 1e-12);
            assert!((gy - p.derive(MultiIndex::new(0, 1)).evaluate(*x)).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_and_quadrature_paths_agree() {
        let l = dof_layout(&pentagon(), 3, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = ScaledFrame::new(Point::new(0.0, 0.0), 2.0);
        let n = basis_size(8);
        let p = Polynomial::from_coeffs(f, 8, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
        let exact = dof_evaluate(&l, &p).unwrap();
        let quad = dof_evaluate(&l, &Opaque(p)).unwrap();
        assert!((&exact - &quad).amax() < 1e-12 * exact.amax());
    }

    #[test]
    fn finite_differences_agree_with_polynomial_derivatives() {
        let f = ScaledFrame::new(Point::new(0.0, 0.0), 1.0);
        let p = Polynomial::from_coeffs(f, 4, (0..15).map(|i| (i as f64).cos()).collect());
        let pts = [Point::new(0.2, 0.3), Point::new(-0.4, 0.1)];
        assert!(finite_difference_mismatch(&p, &pts, 3, 1e-4) < 1e-6);
        assert_eq!(finite_difference_mismatch(&ZeroField, &pts, 3, 1e-4), 0.0);
    }
}
