//! Monomial moments and Gram matrices of scaled monomials on a polygon.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::geometry::Polygon;
use crate::poly::multi_index::{basis_size, enumerate_multiindices, MultiIndex};
use crate::poly::polynomial::{Polynomial, ScaledFrame};
use crate::poly::quadrature::integrate_polygon_fn;
use crate::poly::quadrature::Quadrature;

/// `∫_K m_α` for all `|α| <= degree` in the polygon's scaled frame.
///
/// Products of scaled monomials on the same frame are again monomials, so any
/// `(p, q)_K` with `deg p + deg q <= degree` reduces to a dot product with these.
#[derive(Clone, Debug)]
pub struct CellMoments {
    frame: ScaledFrame,
    degree: usize,
    values: Vec<f64>,
}

impl CellMoments {
    pub fn new(polygon: &Polygon, degree: usize) -> Result<Self> {
        let frame = ScaledFrame::of_polygon(polygon);
        // fail early on degenerate cells
        integrate_polygon_fn(polygon, 0, |_| 1.0)?;
        let quad = Quadrature::polygon(polygon, degree);
        let mut values = vec![0.0; basis_size(degree as isize)];
        let mut px = vec![0.0; degree + 1];
        let mut py = vec![0.0; degree + 1];
        for &(p, w) in &quad.points {
            let x = frame.local(p);
            px[0] = 1.0;
            py[0] = 1.0;
            for i in 1..=degree {
                px[i] = px[i - 1] * x.x;
                py[i] = py[i - 1] * x.y;
            }
            for (pos, a) in enumerate_multiindices(degree as isize).iter().enumerate() {
                values[pos] += w * px[a.x] * py[a.y];
            }
        }
        Ok(Self {
            frame,
            degree,
            values,
        })
    }

    pub fn frame(&self) -> &ScaledFrame {
        &self.frame
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn monomial(&self, alpha: MultiIndex) -> f64 {
        assert!(alpha.order() <= self.degree, "moment degree {} exceeds {}", alpha.order(), self.degree);
        self.values[alpha.position()]
    }

    /// `∫_K p`.
    pub fn integrate(&self, p: &Polynomial) -> f64 {
        p.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| c * self.monomial(MultiIndex::from_position(i)))
            .sum()
    }

    /// `(p, q)_K`.
    pub fn inner(&self, p: &Polynomial, q: &Polynomial) -> f64 {
        let mut acc = 0.0;
        for (i, &a) in p.coeffs().iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let ai = MultiIndex::from_position(i);
            for (j, &b) in q.coeffs().iter().enumerate() {
                if b != 0.0 {
                    acc += a * b * self.monomial(ai + MultiIndex::from_position(j));
                }
            }
        }
        acc
    }

    /// Gram matrix `(m_i, m_j)_K`, `i < rows`, `j < cols` (graded-lex positions).
    pub fn gram(&self, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |i, j| {
            self.monomial(MultiIndex::from_position(i) + MultiIndex::from_position(j))
        })
    }
}

/// The three monomial Gram matrices used by the load vector.
#[derive(Clone, Debug)]
pub struct MassMatrices {
    /// `n_{m-1} × n_{m-1}`
    pub low: DMatrix<f64>,
    /// `n_{k-2m} × n_{k-2m}`, empty when `k < 2m`
    pub interior: DMatrix<f64>,
    /// `n_{m-1} × n_k`
    pub coupling: DMatrix<f64>,
}

pub fn mass_matrices(polygon: &Polygon, m: usize, k: usize) -> Result<MassMatrices> {
    let moments = CellMoments::new(polygon, 2 * k)?;
    Ok(mass_matrices_from(&moments, m, k))
}

pub fn mass_matrices_from(moments: &CellMoments, m: usize, k: usize) -> MassMatrices {
    let n_low = basis_size(m as isize - 1);
    let n_int = basis_size(k as isize - 2 * m as isize);
    let n_k = basis_size(k as isize);
    MassMatrices {
        low: moments.gram(n_low, n_low),
        interior: moments.gram(n_int, n_int),
        coupling: moments.gram(n_low, n_k),
    }
}
