//! Reduction of `(∇^m p, ∇^m φ)_K` to the degrees of freedom of `φ`.
//!
//! Integrating by parts `m` times moves all derivatives onto `p`:
//!
//! ```text
//! (∇^m p, ∇^m φ)_K = ((-Δ)^m p, φ)_K
//!     + Σ_e Σ_{i<m} (∇^i g_i, ∇^i φ)_e,   g_i = ∂_{ν_K} (-Δ)^{m-1-i} p.
//! ```
//!
//! Each edge pairing `(τ, ∇^i φ)_e` is rewritten in the edge frame and the
//! tangential derivatives are integrated by parts along the edge, leaving
//! normal-derivative moments (edge dofs) and endpoint values of derivatives
//! of order at most `i - 1` (vertex dofs).

use nalgebra::DMatrix;

use crate::element::DofLayout;
use crate::error::{Error, Result};
use crate::geometry::{Polygon, Vector};
use crate::poly::{
    basis_size, binomial, directional_weights, integrate_edge, integrate_polygon_fn, MultiIndex,
    Polynomial, TensorPoly,
};

/// Relative size of discarded coefficients above which the edge reduction reports
/// a degree violation rather than rounding noise.
const DEGREE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearFunctional {
    coeffs: Vec<f64>,
}

impl LinearFunctional {
    pub fn zeros(len: usize) -> Self {
        Self {
            coeffs: vec![0.0; len],
        }
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn apply(&self, dofs: &[f64]) -> f64 {
        assert_eq!(dofs.len(), self.coeffs.len());
        self.coeffs.iter().zip(dofs).map(|(c, d)| c * d).sum()
    }

    pub fn axpy(&mut self, a: f64, other: &LinearFunctional) {
        for (s, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *s += a * o;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.abs()))
    }

    fn add(&mut self, index: usize, value: f64) {
        self.coeffs[index] += value;
    }
}

/// `(τ, ∇^i φ)_e` on one edge of the cell; `τ` is stored in the cell frame and
/// restricted to the edge during reduction.
#[derive(Clone, Debug)]
pub struct EdgePairing {
    /// Local edge index in the cell loop.
    pub edge: usize,
    pub tensor: TensorPoly,
}

pub fn reduce_edge_pairing(ep: &EdgePairing, layout: &DofLayout) -> Result<LinearFunctional> {
    let mut out = LinearFunctional::zeros(layout.len());
    add_edge_pairing(&mut out, 1.0, ep, layout)?;
    Ok(out)
}

fn add_edge_pairing(
    out: &mut LinearFunctional,
    weight: f64,
    ep: &EdgePairing,
    layout: &DofLayout,
) -> Result<()> {
    let m = layout.m();
    let k = layout.k() as isize;
    let order = ep.tensor.order();
    if order >= m {
        return Err(Error::DegreePrecondition(format!(
            "edge pairing of order {order} needs vertex data of order {}, above m - 2",
            order - 1
        )));
    }
    let ce = layout
        .geometry()
        .edges
        .get(ep.edge)
        .ok_or_else(|| Error::Dimension(format!("edge {} not in cell", ep.edge)))?;
    let (t, nu, len) = (ce.frame.tangent, ce.frame.normal, ce.frame.length);
    let h = layout.diameter();

    for l in 0..=order {
        let r = order - l;
        let c = ep
            .tensor
            .contract_frame(nu, l, t, r)
            .restrict_to_edge(&ce.frame)
            .scaled(weight * binomial(order, l));
        let size = c.max_abs_coeff();
        if size == 0.0 {
            continue;
        }

        // (-1)^r ∫_e c^{(r)} ∂_ν^l φ, expanded in the edge moments
        let cr = c.derive_n(r);
        let max_degree = k - (2 * m as isize - 1 - l as isize);
        let reference = cr.max_abs_coeff().max(size * len.powi(-(r as i32)));
        if cr.excess_above(max_degree) > DEGREE_TOLERANCE * reference {
            return Err(Error::DegreePrecondition(format!(
                "normal order {l}: coefficient of degree {} exceeds the {} available moments",
                cr.degree(),
                max_degree + 1
            )));
        }
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        let moment_scale = len.powi(1 - l as i32);
        for (i, coef) in cr.coeffs().iter().enumerate().take(layout.edge_moments(l)) {
            out.add(layout.edge_dof(ep.edge, l, i), sign * coef * moment_scale);
        }

        // Σ_q (-1)^q [c^{(q)} ∂_t^{r-1-q} ∂_ν^l φ] from start to end
        let mut cq = c;
        for q in 0..r {
            let tangential = r - 1 - q;
            let total = tangential + l;
            let weights = directional_weights(&[(t, tangential), (nu, l)]);
            let qsign = if q % 2 == 0 { 1.0 } else { -1.0 };
            let unscale = h.powi(-(total as i32));
            for (vertex, s, end_sign) in [(ce.end_local, 0.5, 1.0), (ce.start_local, -0.5, -1.0)] {
                let value = end_sign * qsign * cq.evaluate(s) * unscale;
                for (cx, w) in weights.iter().enumerate() {
                    if *w != 0.0 {
                        let alpha = MultiIndex::new(cx, total - cx);
                        out.add(layout.vertex_dof(vertex, alpha), value * w);
                    }
                }
            }
            cq = cq.derive();
        }
    }
    Ok(())
}

/// Functional `c` with `c · χ(φ) = (∇^m p, ∇^m φ)_K`, for `deg p <= k`.
pub fn pairing_functional(p: &Polynomial, layout: &DofLayout) -> Result<LinearFunctional> {
    let m = layout.m();
    let p = p.reframe(layout.frame());
    if p.excess_above(layout.k() as isize) != 0.0 {
        return Err(Error::Parameter(format!(
            "polynomial of degree {} exceeds k = {}",
            p.degree(),
            layout.k()
        )));
    }
    let mut out = LinearFunctional::zeros(layout.len());

    let bulk = p.laplacian_power(m);
    let n_int = layout.num_interior();
    for (pos, c) in bulk.coeffs().iter().enumerate().take(n_int) {
        out.add(layout.num_boundary() + pos, c * layout.area());
    }

    // ∇^{i+1} (-Δ)^{m-1-i} p, shared by all edges
    let tensors: Vec<TensorPoly> = (0..m)
        .map(|i| p.laplacian_power(m - 1 - i).grad_tensor(i + 1))
        .collect();
    for (edge, ce) in layout.geometry().edges.iter().enumerate() {
        let outward = ce.frame.normal * ce.sign;
        for (i, grad) in tensors.iter().enumerate() {
            if grad.is_zero() {
                continue;
            }
            let ep = EdgePairing {
                edge,
                tensor: grad.dot(outward),
            };
            add_edge_pairing(&mut out, 1.0, &ep, layout).map_err(|e| match e {
                Error::DegreePrecondition(msg) => {
                    Error::DegreePrecondition(format!("edge {edge}, order {i}: {msg}"))
                }
                e => e,
            })?;
        }
    }
    Ok(out)
}

/// Rows of the constraint block, in graded-lex order of `α`, `|α| <= m-1`:
/// `Σ_δ ∂^α φ(δ)` for `|α| <= m-2` and `Σ_e |e|^{-1} ∫_e ∂^α φ` for `|α| = m-1`.
pub fn constraint_functionals(layout: &DofLayout) -> DMatrix<f64> {
    let m = layout.m();
    let rows = layout.kernel_dim();
    let low = basis_size(m as isize - 2);
    let h = layout.diameter();
    let geometry = layout.geometry();
    let mut out = DMatrix::zeros(rows, layout.len());
    for row in 0..low {
        let alpha = MultiIndex::from_position(row);
        let unscale = h.powi(-(alpha.order() as i32));
        for v in 0..geometry.num_vertices() {
            out[(row, layout.vertex_dof(v, alpha))] += unscale;
        }
    }
    let top = m - 1;
    let unscale = h.powi(-(top as i32 - 1));
    for row in low..rows {
        let alpha = MultiIndex::from_position(row);
        for (e, ce) in geometry.edges.iter().enumerate() {
            let (t, nu, len) = (ce.frame.tangent, ce.frame.normal, ce.frame.length);
            // ∂_x = ν_x ∂_ν + t_x ∂_t: weights indexed by the number of ∂_ν
            let frame_weights = directional_weights(&[
                (Vector::new(nu.x, t.x), alpha.x),
                (Vector::new(nu.y, t.y), alpha.y),
            ]);
            for (c, fw) in frame_weights.iter().enumerate() {
                if *fw == 0.0 {
                    continue;
                }
                if c == top {
                    out[(row, layout.edge_dof(e, top, 0))] += fw * len.powi(-(top as i32));
                    continue;
                }
                // ∫_e ∂_t (∂_t^{top-1-c} ∂_ν^c φ) by the fundamental theorem of calculus
                let weights = directional_weights(&[(t, top - 1 - c), (nu, c)]);
                for (vertex, end_sign) in [(ce.end_local, 1.0), (ce.start_local, -1.0)] {
                    for (cx, w) in weights.iter().enumerate() {
                        if *w != 0.0 {
                            let beta = MultiIndex::new(cx, top - 1 - cx);
                            out[(row, layout.vertex_dof(vertex, beta))] +=
                                end_sign * fw * w * unscale / len;
                        }
                    }
                }
            }
        }
    }
    out
}

/// The constraint rows evaluated directly on a polynomial.
pub fn constraint_values(layout: &DofLayout, p: &Polynomial) -> Result<Vec<f64>> {
    let m = layout.m();
    let geometry = layout.geometry();
    let low = basis_size(m as isize - 2);
    let mut out = Vec::with_capacity(layout.kernel_dim());
    for row in 0..layout.kernel_dim() {
        let d = p.derive(MultiIndex::from_position(row));
        let v = if row < low {
            geometry.vertices().iter().map(|&x| d.evaluate(x)).sum()
        } else {
            let mut acc = 0.0;
            for ce in &geometry.edges {
                acc += integrate_edge(&d.restrict_to_edge(&ce.frame), &ce.frame)? / ce.frame.length;
            }
            acc
        };
        out.push(v);
    }
    Ok(out)
}

/// `(∇^m p, ∇^m q)_K` by pointwise quadrature, independent of the moment tables.
pub fn hm_inner_quadrature(polygon: &Polygon, m: usize, p: &Polynomial, q: &Polynomial) -> Result<f64> {
    let dp: Vec<Polynomial> = (0..=m).map(|c| p.derive(MultiIndex::new(c, m - c))).collect();
    let dq: Vec<Polynomial> = (0..=m).map(|c| q.derive(MultiIndex::new(c, m - c))).collect();
    let degree = (p.degree() + q.degree()).saturating_sub(2 * m);
    integrate_polygon_fn(polygon, degree, |x| {
        (0..=m)
            .map(|c| binomial(m, c) * dp[c].evaluate(x) * dq[c].evaluate(x))
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{dof_evaluate, dof_layout, DofEvaluator, DofKind};
    use crate::geometry::Point;
    use crate::mesh::CellGeometry;
    use crate::poly::ScaledFrame;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cell(points: &[(f64, f64)]) -> CellGeometry {
        CellGeometry::from_polygon(
            Polygon::new(points.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap(),
        )
        .unwrap()
    }

    fn unit_triangle() -> CellGeometry {
        cell(&[(0., 0.), (1., 0.), (0., 1.)])
    }

    fn quad() -> CellGeometry {
        cell(&[(0., 0.), (1.1, 0.1), (0.9, 1.0), (0.1, 0.8)])
    }

    fn hexagon() -> CellGeometry {
        cell(&[(0., 0.), (0.6, -0.1), (1.1, 0.3), (1.0, 0.9), (0.4, 1.1), (-0.1, 0.6)])
    }

    fn random_poly(rng: &mut ChaCha8Rng, frame: ScaledFrame, degree: usize) -> Polynomial {
        let n = basis_size(degree as isize);
        Polynomial::from_coeffs(frame, degree, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
    }

    #[test]
    fn zero_tensor_gives_zero_functional() {
        let l = dof_layout(&quad(), 3, 5).unwrap();
        let zero = Polynomial::zero(l.frame(), 2);
        let ep = EdgePairing {
            edge: 1,
            tensor: zero.grad_tensor(1),
        };
        assert_eq!(reduce_edge_pairing(&ep, &l).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn scalar_one_picks_mean_value_dof() {
        let g = quad();
        let l = dof_layout(&g, 3, 5).unwrap();
        let one = Polynomial::monomial(l.frame(), MultiIndex::ZERO);
        for e in 0..4 {
            let ep = EdgePairing {
                edge: e,
                tensor: TensorPoly::new(0, vec![one.clone()]),
            };
            let c = reduce_edge_pairing(&ep, &l).unwrap();
            let len = g.edges[e].frame.length;
            assert!((c.coeffs()[l.edge_dof(e, 0, 0)] - len).abs() < 1e-15);
            assert_eq!(c.coeffs().iter().filter(|v| **v != 0.0).count(), 1);
            let ev = DofEvaluator::new(&l).unwrap();
            for pos in 0..basis_size(5) {
                let p = Polynomial::basis(l.frame(), 5, pos);
                let chi = ev.evaluate(&p);
                let direct = integrate_edge(&p.restrict_to_edge(&g.edges[e].frame), &g.edges[e].frame)
                    .unwrap();
                assert!((c.apply(chi.as_slice()) - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_normal_gives_normal_flux() {
        let g = hexagon();
        let l = dof_layout(&g, 3, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for e in 0..g.num_edges() {
            let ce = g.edges[e];
            let n = ce.frame.normal * ce.sign;
            let comps = vec![
                Polynomial::monomial(l.frame(), MultiIndex::ZERO).scaled(n.y),
                Polynomial::monomial(l.frame(), MultiIndex::ZERO).scaled(n.x),
            ];
            let c = reduce_edge_pairing(&EdgePairing { edge: e, tensor: TensorPoly::new(1, comps) }, &l)
                .unwrap();
            for _ in 0..5 {
                let p = random_poly(&mut rng, l.frame(), 5);
                let chi = dof_evaluate(&l, &p).unwrap();
                let dn = p.directional_derivative(n, 1).restrict_to_edge(&ce.frame);
                let direct = integrate_edge(&dn, &ce.frame).unwrap();
                assert!((c.apply(chi.as_slice()) - direct).abs() < 1e-10 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn missing_moments_are_reported() {
        // for m = 3, k = 3 there is no first-normal-derivative moment
        let l = dof_layout(&quad(), 3, 3).unwrap();
        let comps = vec![
            Polynomial::monomial(l.frame(), MultiIndex::ZERO),
            Polynomial::monomial(l.frame(), MultiIndex::ZERO),
        ];
        let r = reduce_edge_pairing(&EdgePairing { edge: 0, tensor: TensorPoly::new(1, comps) }, &l);
        assert!(matches!(r, Err(Error::DegreePrecondition(_))));
    }

    #[test]
    fn low_degree_polynomials_have_zero_functional() {
        let l = dof_layout(&hexagon(), 3, 6).unwrap();
        for pos in 0..basis_size(2) {
            let p = Polynomial::basis(l.frame(), 2, pos);
            assert!(pairing_functional(&p, &l).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_on_triangle_uses_only_boundary_dofs() {
        let l = dof_layout(&unit_triangle(), 3, 3).unwrap();
        assert_eq!(l.num_interior(), 0);
        let p = Polynomial::monomial(l.frame(), MultiIndex::new(3, 0));
        let c = pairing_functional(&p, &l).unwrap();
        assert!(c.max_abs() > 0.0);
        let q = Polynomial::monomial(l.frame(), MultiIndex::new(3, 0));
        let chi = dof_evaluate(&l, &q).unwrap();
        let oracle = hm_inner_quadrature(&l.geometry().polygon, 3, &p, &q).unwrap();
        assert!((c.apply(chi.as_slice()) - oracle).abs() < 1e-10 * oracle.abs());
    }

    fn check_oracle(g: &CellGeometry, m: usize, k: usize) -> f64 {
        let l = dof_layout(g, m, k).unwrap();
        let ev = DofEvaluator::new(&l).unwrap();
        let n = basis_size(k as isize);
        let basis: Vec<Polynomial> = (0..n).map(|i| Polynomial::basis(l.frame(), k, i)).collect();
        let chis: Vec<_> = basis.iter().map(|p| ev.evaluate(p)).collect();
        let mut oracle = DMatrix::zeros(n, n);
        let mut reduced = DMatrix::zeros(n, n);
        for r in 0..n {
            let c = pairing_functional(&basis[r], &l).unwrap();
            for s in 0..n {
                reduced[(r, s)] = c.apply(chis[s].as_slice());
                oracle[(r, s)] =
                    hm_inner_quadrature(&g.polygon, m, &basis[r], &basis[s]).unwrap();
            }
        }
        (reduced - &oracle).amax() / oracle.amax()
    }

    #[test]
    fn oracle_equivalence() {
        for g in [unit_triangle(), quad(), hexagon()] {
            for (m, k) in [(3, 3), (3, 4), (3, 6), (3, 8), (4, 4), (4, 7), (4, 9)] {
                let err = check_oracle(&g, m, k);
                assert!(err < 1e-10, "m={m} k={k}: {err:e}");
            }
        }
    }

    #[test]
    fn relabeling_the_start_vertex_changes_nothing() {
        let g = hexagon();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (m, k) in [(3, 4), (3, 7), (4, 6)] {
            let p = random_poly(&mut rng, ScaledFrame::new(Point::origin(), 1.0), k);
            let q = random_poly(&mut rng, ScaledFrame::new(Point::origin(), 1.0), k);
            let base = {
                let l = dof_layout(&g, m, k).unwrap();
                pairing_functional(&p, &l).unwrap().apply(dof_evaluate(&l, &q).unwrap().as_slice())
            };
            for shift in 1..g.num_vertices() {
                let gr = g.rotated(shift).unwrap();
                let l = dof_layout(&gr, m, k).unwrap();
                let v = pairing_functional(&p, &l).unwrap().apply(dof_evaluate(&l, &q).unwrap().as_slice());
                assert!((v - base).abs() < 1e-10 * base.abs().max(1.0), "{v} vs {base}");
            }
        }
    }

    #[test]
    fn constraint_rows() {
        let g = hexagon();
        for (m, k) in [(3, 3), (3, 6), (4, 5), (5, 7)] {
            let l = dof_layout(&g, m, k).unwrap();
            let c = constraint_functionals(&l);
            assert_eq!(c.nrows(), basis_size(m as isize - 1));
            let ev = DofEvaluator::new(&l).unwrap();
            let one = ev.evaluate(&Polynomial::monomial(l.frame(), MultiIndex::ZERO));
            let applied = &c * &one;
            assert!((applied[0] - 6.0).abs() < 1e-13);
            assert!(applied.rows(1, applied.len() - 1).amax() < 1e-13);
            for pos in 0..basis_size(k as isize) {
                let p = Polynomial::basis(l.frame(), k, pos);
                let via_dofs = &c * ev.evaluate(&p);
                let direct = constraint_values(&l, &p).unwrap();
                for (a, b) in via_dofs.iter().zip(&direct) {
                    assert!((a - b).abs() < 1e-11 * b.abs().max(1.0), "m={m} k={k} pos={pos}");
                }
            }
        }
        assert_eq!(constraint_functionals(&dof_layout(&g, 3, 3).unwrap()).nrows(), 6);
    }

    #[test]
    fn interior_block_carries_cell_area() {
        // for m = 3, k = 6 the bulk term of m_(6,0) is a constant times the mean dof
        let l = dof_layout(&quad(), 3, 6).unwrap();
        let p = Polynomial::monomial(l.frame(), MultiIndex::new(6, 0));
        let c = pairing_functional(&p, &l).unwrap();
        let bulk = -720.0 / l.diameter().powi(6);
        let idx = l.interior_dof(MultiIndex::ZERO);
        assert!((c.coeffs()[idx] - bulk * l.area()).abs() < 1e-9 * bulk.abs());
        assert!(matches!(l.descriptors()[idx].kind, DofKind::Interior { .. }));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn pairing_is_linear(seed in any::<u64>(), a in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = dof_layout(&hexagon(), 3, 6).unwrap();
            let p = random_poly(&mut rng, l.frame(), 6);
            let q = random_poly(&mut rng, l.frame(), 6);
            let mut sum = p.clone();
            sum.axpy(a, &q);
            let lhs = pairing_functional(&sum, &l).unwrap();
            let mut rhs = pairing_functional(&p, &l).unwrap();
            rhs.axpy(a, &pairing_functional(&q, &l).unwrap());
            let scale = lhs.max_abs().max(1.0);
            for (x, y) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                prop_assert!((x - y).abs() <= 1e-12 * scale);
            }
        }
    }
}
