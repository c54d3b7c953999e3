//! Projection, stiffness and load for one element.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use super::dofs::{DofEvaluator, ScalarField, ANALYTIC_QUADRATURE_DEGREE};
use super::layout::DofLayout;
use crate::error::{Error, Result};
use crate::green::{constraint_functionals, constraint_values, pairing_functional};
use crate::mesh::{format_f64, CellGeometry};
use crate::poly::{basis_size, CellMoments, MultiIndex, Polynomial, Quadrature, ScaledFrame};

/// Which of the three load-vector constructions applies to `(m, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadRegime {
    /// `m <= k <= 2m-1`: `b = Πᵀ F`.
    Projected,
    /// `2m <= k <= 3m-2`: low-order projection plus interior moments of the remainder.
    Mixed,
    /// `k >= 3m-1`: interior moments only.
    Moments,
}

impl LoadRegime {
    pub fn of(m: usize, k: usize) -> Self {
        if k < 2 * m {
            Self::Projected
        } else if k < 3 * m - 1 {
            Self::Mixed
        } else {
            Self::Moments
        }
    }
}

#[derive(Clone, Debug)]
pub struct ElementMatrices {
    pub layout: DofLayout,
    /// `N_K × n_k`, column `j` is `χ(m_j)`.
    pub d: DMatrix<f64>,
    /// `n_k × N_K`.
    pub b: DMatrix<f64>,
    /// `n_k × n_k`.
    pub g: DMatrix<f64>,
    /// `n_k × N_K`, coefficients of `Π^K φ` from `χ(φ)`.
    pub pi: DMatrix<f64>,
    /// Diagonal of the stabilization matrix.
    pub s: DVector<f64>,
    /// `N_K × N_K`.
    pub a: DMatrix<f64>,
    /// Load vector, length `N_K`.
    pub rhs: DVector<f64>,
}

impl ElementMatrices {
    pub fn m(&self) -> usize {
        self.layout.m()
    }

    pub fn k(&self) -> usize {
        self.layout.k()
    }

    /// `G22`: the rows of `G` below the constraint block.
    pub fn g22(&self) -> DMatrix<f64> {
        let n_low = self.layout.kernel_dim();
        let n = self.g.nrows();
        self.g.view((n_low, n_low), (n - n_low, n - n_low)).into_owned()
    }

    /// `Π^K φ` from the dofs of `φ`.
    pub fn project(&self, dofs: &DVector<f64>) -> Polynomial {
        project(&self.pi, self.layout.frame(), self.k(), dofs)
    }

    /// `‖Π D - I‖_max`.
    pub fn projector_residual(&self) -> f64 {
        let n = self.pi.nrows();
        (&self.pi * &self.d - DMatrix::<f64>::identity(n, n)).amax()
    }

    /// `‖G - B D‖_max / ‖G‖_max`.
    pub fn gram_residual(&self) -> f64 {
        (&self.g - &self.b * &self.d).amax() / self.g.amax()
    }

    /// Per-cell JSON record with 17-digit decimals, matrices row-major.
    pub fn to_debug_json(&self) -> String {
        let mut out = String::from("{");
        let _ = write!(
            out,
            "\"m\": {}, \"k\": {}, \"D\": {}, \"B\": {}, \"G\": {}, \"Pi\": {}, \"A\": {}, \"b\": {}",
            self.m(),
            self.k(),
            matrix_json(&self.d),
            matrix_json(&self.b),
            matrix_json(&self.g),
            matrix_json(&self.pi),
            matrix_json(&self.a),
            vector_json(self.rhs.as_slice()),
        );
        out.push('}');
        out
    }
}

fn vector_json(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format_f64(*x)).collect();
    format!("[{}]", items.join(", "))
}

fn matrix_json(m: &DMatrix<f64>) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| vector_json(&r.iter().copied().collect::<Vec<_>>()))
        .collect();
    format!("[{}]", rows.join(", "))
}

pub fn project(pi: &DMatrix<f64>, frame: ScaledFrame, k: usize, dofs: &DVector<f64>) -> Polynomial {
    let coeffs = pi * dofs;
    Polynomial::from_coeffs(frame, k, coeffs.as_slice().to_vec())
}

/// `(f, m_i)_K` for `i < count`.
pub fn field_moments(
    field: &dyn ScalarField,
    moments: &CellMoments,
    polygon: &crate::geometry::Polygon,
    count: usize,
) -> Vec<f64> {
    if count == 0 {
        return Vec::new();
    }
    let frame = *moments.frame();
    let top = MultiIndex::from_position(count - 1).order();
    if let Some(p) = field.as_polynomial() {
        let p = p.reframe(frame);
        if p.degree() + top <= moments.degree() {
            return (0..count)
                .map(|i| moments.inner(&p, &Polynomial::monomial(frame, MultiIndex::from_position(i))))
                .collect();
        }
        let wider = CellMoments::new(polygon, p.degree() + top).expect("valid polygon");
        return (0..count)
            .map(|i| wider.inner(&p, &Polynomial::monomial(frame, MultiIndex::from_position(i))))
            .collect();
    }
    let quad = Quadrature::polygon(polygon, ANALYTIC_QUADRATURE_DEGREE + top);
    let mut out = vec![0.0; count];
    for &(x, w) in &quad.points {
        let v = w * field.value(x);
        let xl = frame.local(x);
        for (i, slot) in out.iter_mut().enumerate() {
            let a = MultiIndex::from_position(i);
            *slot += v * xl.x.powi(a.x as i32) * xl.y.powi(a.y as i32);
        }
    }
    out
}

/// Solves `G X = B` by LU with partial pivoting after scaling each row of `G`
/// (and of `B`) to unit maximum.
fn solve_projection(g: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut gs = g.clone();
    let mut bs = b.clone();
    for i in 0..g.nrows() {
        let s = g.row(i).amax();
        if s == 0.0 || !s.is_finite() {
            return None;
        }
        gs.row_mut(i).scale_mut(1.0 / s);
        bs.row_mut(i).scale_mut(1.0 / s);
    }
    let x = gs.lu().solve(&bs)?;
    x.iter().all(|v| v.is_finite()).then_some(x)
}

pub fn element_matrices(
    geometry: &CellGeometry,
    m: usize,
    k: usize,
    f: &dyn ScalarField,
) -> Result<ElementMatrices> {
    let layout = DofLayout::new(geometry.clone(), m, k)?;
    let moments = CellMoments::new(&geometry.polygon, 2 * k)?;
    let evaluator = DofEvaluator::with_moments(&layout, moments);
    let moments = evaluator.moments();
    let frame = layout.frame();
    let n_k = basis_size(k as isize);
    let n_low = layout.kernel_dim();
    let n = layout.len();
    let basis: Vec<Polynomial> = (0..n_k).map(|j| Polynomial::basis(frame, k, j)).collect();

    let mut d = DMatrix::zeros(n, n_k);
    for (j, p) in basis.iter().enumerate() {
        d.set_column(j, &evaluator.evaluate_polynomial(p));
    }

    let mut b = DMatrix::zeros(n_k, n);
    b.rows_mut(0, n_low).copy_from(&constraint_functionals(&layout));
    for (r, p) in basis.iter().enumerate().skip(n_low) {
        let c = pairing_functional(p, &layout)?;
        b.row_mut(r).copy_from_slice(c.coeffs());
    }

    let mut g = DMatrix::zeros(n_k, n_k);
    for (j, p) in basis.iter().enumerate() {
        for (i, v) in constraint_values(&layout, p)?.into_iter().enumerate() {
            g[(i, j)] = v;
        }
    }
    let tensors: Vec<_> = basis.iter().map(|p| p.grad_tensor(m)).collect();
    for r in n_low..n_k {
        for s in r..n_k {
            let v = moments.integrate(&tensors[r].contract(&tensors[s]));
            g[(r, s)] = v;
            g[(s, r)] = v;
        }
    }

    let pi = solve_projection(&g, &b).ok_or(Error::SingularProjection { cell: 0 })?;

    let h = layout.diameter();
    let stab = h.powi(2 - 2 * m as i32);
    let s = DVector::from_fn(n, |i, _| if i < layout.num_boundary() { stab } else { 0.0 });

    let mut g_energy = g.clone();
    g_energy.rows_mut(0, n_low).fill(0.0);
    let consistency = pi.transpose() * (&g_energy * &pi);
    let residual = DMatrix::<f64>::identity(n, n) - &d * &pi;
    let mut weighted = residual.clone();
    for (i, si) in s.iter().enumerate() {
        weighted.row_mut(i).scale_mut(*si);
    }
    let a = consistency + residual.transpose() * weighted;

    let rhs = load_vector(&layout, moments, &pi, &residual, f)?;

    Ok(ElementMatrices {
        layout,
        d,
        b,
        g,
        pi,
        s,
        a,
        rhs,
    })
}

fn load_vector(
    layout: &DofLayout,
    moments: &CellMoments,
    pi: &DMatrix<f64>,
    residual: &DMatrix<f64>,
    f: &dyn ScalarField,
) -> Result<DVector<f64>> {
    let (m, k) = (layout.m(), layout.k());
    let n = layout.len();
    let n_low = layout.kernel_dim();
    let n_int = layout.num_interior();
    let polygon = &layout.geometry().polygon;
    let regime = LoadRegime::of(m, k);
    let count = match regime {
        LoadRegime::Projected => basis_size(k as isize),
        LoadRegime::Mixed => n_low.max(n_int),
        LoadRegime::Moments => n_int,
    };
    let fm = field_moments(f, moments, polygon, count);
    if fm.iter().all(|v| *v == 0.0) {
        return Ok(DVector::zeros(n));
    }

    let interior_part = |fm: &[f64]| -> Result<DVector<f64>> {
        let mt = moments.gram(n_int, n_int);
        let c = mt
            .cholesky()
            .ok_or_else(|| Error::DegenerateGeometry("singular interior mass matrix".into()))?
            .solve(&DVector::from_column_slice(&fm[..n_int]));
        let mut v = DVector::zeros(n);
        v.rows_mut(layout.num_boundary(), n_int)
            .copy_from(&(c * layout.area()));
        Ok(v)
    };

    Ok(match regime {
        LoadRegime::Projected => pi.transpose() * DVector::from_vec(fm),
        LoadRegime::Mixed => {
            let low = moments.gram(n_low, n_low);
            let coupling = moments.gram(n_low, basis_size(k as isize));
            let c = low
                .cholesky()
                .ok_or_else(|| Error::DegenerateGeometry("singular low-order mass matrix".into()))?
                .solve(&DVector::from_column_slice(&fm[..n_low]));
            let projected = pi.transpose() * (coupling.transpose() * c);
            projected + residual.transpose() * interior_part(&fm)?
        }
        LoadRegime::Moments => interior_part(&fm)?,
    })
}
