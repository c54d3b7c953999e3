//! Univariate polynomials on an edge in the scaled coordinate `s = (x - x_e)·t_e / |e|`.

use crate::error::{Error, Result};
use crate::geometry::EdgeFrame;
use crate::poly::quadrature::LineRule;

#[derive(Clone, Debug, PartialEq)]
pub struct EdgePolynomial {
    length: f64,
    coeffs: Vec<f64>,
}

impl EdgePolynomial {
    pub fn new(length: f64, coeffs: Vec<f64>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        Self { length, coeffs }
    }

    pub fn zero(length: f64) -> Self {
        Self::new(length, vec![0.0])
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Nominal degree.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn evaluate(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    /// Derivative with respect to arclength along the tangent.
    pub fn derive(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(self.length);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| c * (i + 1) as f64 / self.length)
            .collect();
        Self::new(self.length, coeffs)
    }

    pub fn derive_n(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derive())
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::new(self.length, self.coeffs.iter().map(|c| a * c).collect())
    }

    pub fn axpy(&mut self, a: f64, other: &EdgePolynomial) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0.0);
        }
        for (s, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *s += a * o;
        }
    }

    /// Largest absolute coefficient of degree above `degree`.
    pub fn excess_above(&self, degree: isize) -> f64 {
        let start = if degree < 0 { 0 } else { degree as usize + 1 };
        self.coeffs
            .iter()
            .skip(start)
            .fold(0.0, |a, c| a.max(c.abs()))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.excess_above(-1)
    }
}

/// `∫_e p` with a Gauss rule of exactness `deg p`.
pub fn integrate_edge(p: &EdgePolynomial, edge: &EdgeFrame) -> Result<f64> {
    if !(edge.length > 0.0) {
        return Err(Error::DegenerateGeometry("zero-length edge".into()));
    }
    let rule = LineRule::exact_to(p.degree());
    Ok(rule.integrate_edge(edge, |s, _| p.evaluate(s)))
}
