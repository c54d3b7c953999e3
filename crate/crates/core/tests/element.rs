use hmvem::element::{
    dof_evaluate, element_matrices, serendipity_check, DofLayout, LoadRegime, ScalarField, ZeroField,
};
use hmvem::geometry::{Point, Vector};
use hmvem::green::constraint_functionals;
use hmvem::harness::polygon_zoo;
use hmvem::mesh::CellGeometry;
use hmvem::poly::{binomial, MultiIndex, Polynomial, Quadrature};
use nalgebra::{DMatrix, DVector};

fn square() -> CellGeometry {
    polygon_zoo().into_iter().find(|(n, _)| *n == "unit-square").unwrap().1
}

fn triangle() -> CellGeometry {
    polygon_zoo().into_iter().find(|(n, _)| *n == "triangle").unwrap().1
}

#[test]
fn projector_and_gram_identities_on_the_zoo() {
    for (name, g) in polygon_zoo() {
        for (m, top) in [(3, 5), (4, 6)] {
            for k in m..=top {
                let e = element_matrices(&g, m, k, &ZeroField).unwrap();
                assert!(e.projector_residual() <= 1e-9, "{name} m={m} k={k}: {:e}", e.projector_residual());
                assert!(e.gram_residual() <= 1e-9, "{name} m={m} k={k}: {:e}", e.gram_residual());
            }
        }
    }
}

#[test]
fn stiffness_is_symmetric_psd_with_polynomial_kernel() {
    for (name, g) in polygon_zoo().into_iter().filter(|(n, _)| *n != "thin-quad") {
        for (m, k) in [(3, 3), (3, 4), (3, 6), (4, 4), (4, 7)] {
            let e = element_matrices(&g, m, k, &ZeroField).unwrap();
            let a = &e.a;
            let scale = a.amax();
            assert!((a - a.transpose()).amax() <= 1e-12 * scale, "{name} m={m} k={k}");
            let eig = a.clone().symmetric_eigen().eigenvalues;
            let lmax = eig.max();
            assert!(eig.min() >= -1e-9 * lmax, "{name} m={m} k={k}");
            let rank = eig.iter().filter(|&&l| l > 1e-8 * lmax).count();
            assert_eq!(rank, e.layout.len() - e.layout.kernel_dim(), "{name} m={m} k={k}");
            let low = e.d.columns(0, e.layout.kernel_dim());
            assert!((a * low).amax() <= 1e-8 * scale, "{name} m={m} k={k}");
        }
    }
}

#[test]
fn kernel_dimension_is_six_for_m3() {
    let e = element_matrices(&triangle(), 3, 3, &ZeroField).unwrap();
    assert_eq!(e.layout.kernel_dim(), 6);
    assert_eq!(e.g22().nrows(), 10 - 6);
}

#[test]
fn stabilization_is_boundary_only() {
    let g = square();
    let e = element_matrices(&g, 3, 6, &ZeroField).unwrap();
    let h = g.diameter();
    let nb = e.layout.num_boundary();
    assert!(e.s.rows(0, nb).iter().all(|&s| (s - h.powi(-4)).abs() < 1e-14));
    assert!(e.s.rows(nb, e.layout.len() - nb).iter().all(|&s| s == 0.0));
}

#[test]
fn zero_load_gives_zero_rhs() {
    for k in 3..=8 {
        let e = element_matrices(&square(), 3, k, &ZeroField).unwrap();
        assert!(e.rhs.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn regime_boundaries() {
    let regimes: Vec<_> = (3..=9).map(|k| LoadRegime::of(3, k)).collect();
    use LoadRegime::*;
    assert_eq!(regimes, [Projected, Projected, Projected, Mixed, Mixed, Moments, Moments]);
    assert_eq!(LoadRegime::of(4, 7), Projected);
    assert_eq!(LoadRegime::of(4, 8), Mixed);
    assert_eq!(LoadRegime::of(4, 11), Moments);
}

/// `bᵀ χ(p) = (f, p)_K` on every monomial whenever `f` lies in the space the
/// load construction reproduces.
fn check_load_reproduces_moments(g: &CellGeometry, m: usize, k: usize, f: &Polynomial) {
    let e = element_matrices(g, m, k, f).unwrap();
    let quad = Quadrature::polygon(&g.polygon, f.degree() + k + 2);
    for j in 0..e.layout.poly_dim() {
        let p = Polynomial::basis(e.layout.frame(), k, j);
        let lhs = e.rhs.dot(&e.d.column(j));
        let rhs = quad.integrate(|x| f.evaluate(x) * p.evaluate(x));
        let scale = quad.integrate(|x| (f.evaluate(x) * p.evaluate(x)).abs());
        assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1e-300), "m={m} k={k} j={j}: {lhs} vs {rhs}");
    }
}

#[test]
fn mixed_regime_is_exact_for_constant_load() {
    for (_, g) in polygon_zoo() {
        let f = Polynomial::from_coeffs(hmvem::poly::ScaledFrame::of_polygon(&g.polygon), 0, vec![2.5]);
        check_load_reproduces_moments(&g, 3, 6, &f);
    }
}

#[test]
fn other_regimes_reproduce_moments() {
    let g = polygon_zoo().into_iter().find(|(n, _)| *n == "perturbed-hexagon").unwrap().1;
    let frame = hmvem::poly::ScaledFrame::of_polygon(&g.polygon);
    // projected regime: any load
    let f = Polynomial::from_coeffs(frame, 2, vec![1.0, -0.5, 0.25, 2.0, 0.1, -1.0]);
    check_load_reproduces_moments(&g, 3, 4, &f);
    // mixed with k = 7 reproduces linear loads
    let f1 = Polynomial::from_coeffs(frame, 1, vec![1.0, -0.5, 0.75]);
    check_load_reproduces_moments(&g, 3, 7, &f1);
    // moment regime reproduces loads up to k - 2m
    check_load_reproduces_moments(&g, 3, 8, &f);
}

#[test]
fn scaling_invariance() {
    for (name, g) in polygon_zoo().into_iter().filter(|(n, _)| *n != "thin-quad") {
        let m = 3;
        let k = 5;
        let base = element_matrices(&g, m, k, &ZeroField).unwrap();
        for c in [0.125, 3.0] {
            let moved = g.polygon.translated_scaled(Vector::new(2.0, -1.5), c).unwrap();
            let cell = CellGeometry::from_polygon(moved).unwrap();
            let e = element_matrices(&cell, m, k, &ZeroField).unwrap();
            assert!((&e.d - &base.d).amax() <= 1e-12 * base.d.amax(), "{name} c={c}");
            assert!((&e.pi - &base.pi).amax() <= 1e-12 * base.pi.amax(), "{name} c={c}");
            let factor = c.powi(2 - 2 * m as i32);
            assert!((&e.a - &base.a * factor).amax() <= 1e-12 * e.a.amax(), "{name} c={c}");
        }
    }
}

#[test]
fn project_recovers_monomials_and_zero() {
    let g = polygon_zoo().into_iter().find(|(n, _)| *n == "regular-pentagon").unwrap().1;
    let e = element_matrices(&g, 3, 6, &ZeroField).unwrap();
    for j in 0..e.layout.poly_dim() {
        let dofs = e.d.column(j).into_owned();
        let p = e.project(&dofs);
        for (i, c) in p.coeffs().iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-9, "j={j} i={i} c={c}");
        }
    }
    let zero = e.project(&DVector::zeros(e.layout.len()));
    assert!(zero.coeffs().iter().all(|&c| c == 0.0));
}

/// `e^x sin y`.
struct ExpSin;

impl ScalarField for ExpSin {
    fn derivative(&self, alpha: MultiIndex, x: Point) -> f64 {
        let s = match alpha.y % 4 {
            0 => x.y.sin(),
            1 => x.y.cos(),
            2 => -x.y.sin(),
            _ => -x.y.cos(),
        };
        x.x.exp() * s
    }
}

fn hm_contraction(m: usize, du: impl Fn(MultiIndex) -> f64, dp: impl Fn(MultiIndex) -> f64) -> f64 {
    (0..=m)
        .map(|y| {
            let a = MultiIndex::new(m - y, y);
            binomial(m, y) * du(a) * dp(a)
        })
        .sum()
}

#[test]
fn projection_of_analytic_field_matches_constrained_least_squares() {
    let g = square();
    for (m, k) in [(3, 4), (3, 6)] {
        let e = element_matrices(&g, m, k, &ZeroField).unwrap();
        let layout = DofLayout::new(g.clone(), m, k).unwrap();
        let chi = dof_evaluate(&layout, &ExpSin).unwrap();
        let projected = e.project(&chi);

        // oracle: constraint rows from the dofs, energy rows by direct quadrature
        let n_low = layout.kernel_dim();
        let n_k = layout.poly_dim();
        let quad = Quadrature::polygon(&g.polygon, 30);
        let basis: Vec<_> = (0..n_k).map(|j| Polynomial::basis(layout.frame(), k, j)).collect();
        let mut lhs = DMatrix::zeros(n_k, n_k);
        let mut rhs = DVector::zeros(n_k);
        let constraints = constraint_functionals(&layout);
        for r in 0..n_low {
            rhs[r] = constraints.row(r).dot(&chi.transpose());
            for s in 0..n_k {
                lhs[(r, s)] = constraints.row(r).dot(&e.d.column(s).transpose());
            }
        }
        for r in n_low..n_k {
            rhs[r] = quad.integrate(|x| {
                hm_contraction(m, |a| ExpSin.derivative(a, x), |a| basis[r].derive(a).evaluate(x))
            });
            for s in 0..n_k {
                lhs[(r, s)] = quad.integrate(|x| {
                    hm_contraction(m, |a| basis[s].derive(a).evaluate(x), |a| basis[r].derive(a).evaluate(x))
                });
            }
        }
        let oracle = lhs.lu().solve(&rhs).unwrap();
        let diff = (DVector::from_column_slice(projected.coeffs()) - &oracle).amax();
        assert!(diff <= 1e-6 * oracle.amax(), "m={m} k={k}: {diff:e}");
    }
}

#[test]
fn serendipity_reduced_set_on_triangle() {
    let g = triangle();
    let layout = DofLayout::new(g.clone(), 3, 5).unwrap();
    let mut selected: Vec<usize> = (0..3 * layout.per_vertex()).collect();
    for e in 0..3 {
        selected.push(layout.edge_dof(e, 0, 0));
        selected.push(layout.edge_dof(e, 2, 0));
    }
    let report = serendipity_check(&g, 3, 5, 4, &selected).unwrap();
    assert_eq!(report.rank, 15);
    assert_eq!(report.dimension, 15);
    assert!(report.satisfied);
}

#[test]
fn serendipity_full_set_and_empty_selection() {
    let g = square();
    let layout = DofLayout::new(g.clone(), 3, 4).unwrap();
    let all: Vec<usize> = (0..layout.len()).collect();
    assert!(serendipity_check(&g, 3, 4, 4, &all).unwrap().satisfied);
    let empty = serendipity_check(&g, 3, 4, 2, &[]).unwrap();
    assert!(!empty.satisfied);
    assert_eq!(empty.rank, 0);
    assert!(serendipity_check(&g, 3, 4, 2, &[layout.len()]).is_err());
}

#[test]
fn debug_json_round_trips_exactly() {
    let e = element_matrices(&triangle(), 3, 3, &ZeroField).unwrap();
    let v: serde_json::Value = serde_json::from_str(&e.to_debug_json()).unwrap();
    assert_eq!(v["m"], 3);
    let pi = v["Pi"].as_array().unwrap();
    assert_eq!(pi.len(), e.pi.nrows());
    for (i, row) in pi.iter().enumerate() {
        for (j, x) in row.as_array().unwrap().iter().enumerate() {
            assert_eq!(x.as_f64().unwrap(), e.pi[(i, j)]);
        }
    }
    assert_eq!(v["b"].as_array().unwrap().len(), e.layout.len());
}

#[test]
fn degenerate_parameters_are_rejected() {
    assert!(element_matrices(&square(), 2, 3, &ZeroField).is_err());
    assert!(element_matrices(&square(), 3, 2, &ZeroField).is_err());
}

#[test]
fn vertex_dofs_are_invariant_under_relabeling() {
    let g = polygon_zoo().into_iter().find(|(n, _)| *n == "perturbed-hexagon").unwrap().1;
    let p = Polynomial::from_coeffs(
        hmvem::poly::ScaledFrame::new(Point::new(0.0, 0.0), 1.0),
        3,
        vec![1.0, 2.0, -1.0, 0.5, 0.0, 3.0, -2.0, 1.0, 0.0, 0.25],
    );
    let a = element_matrices(&g, 3, 4, &ZeroField).unwrap();
    let rot = g.rotated(2).unwrap();
    let b = element_matrices(&rot, 3, 4, &ZeroField).unwrap();
    let chi_a = dof_evaluate(&a.layout, &p).unwrap();
    let chi_b = dof_evaluate(&b.layout, &p).unwrap();
    let energy = |e: &hmvem::element::ElementMatrices, x: &DVector<f64>| x.dot(&(&e.a * x));
    let (ea, eb) = (energy(&a, &chi_a), energy(&b, &chi_b));
    assert!((ea - eb).abs() <= 1e-10 * ea.abs());
}
