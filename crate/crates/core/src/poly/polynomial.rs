//! Bivariate polynomials in scaled monomial coordinates.
//!
//! A polynomial lives on a [`ScaledFrame`] `(x_G, h_G)` and is stored as the
//! coefficient vector of the monomials `((x - x_G) / h_G)^α`, graded-lex in `α`.

use crate::geometry::{EdgeFrame, Point, Polygon, Vector};
use crate::poly::edge::EdgePolynomial;
use crate::poly::multi_index::{basis_size, binomial, falling_factorial, homogeneous, MultiIndex};
use crate::poly::quadrature::Quadrature;
use crate::poly::tensor::TensorPoly;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledFrame {
    pub center: Point,
    pub scale: f64,
}

impl ScaledFrame {
    pub fn new(center: Point, scale: f64) -> Self {
        Self { center, scale }
    }

    /// Centroid and diameter of a polygon.
    pub fn of_polygon(polygon: &Polygon) -> Self {
        Self::new(polygon.centroid(), polygon.diameter())
    }

    pub fn local(&self, p: Point) -> Vector {
        (p - self.center) / self.scale
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    frame: ScaledFrame,
    degree: usize,
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn zero(frame: ScaledFrame, degree: usize) -> Self {
        Self {
            frame,
            degree,
            coeffs: vec![0.0; basis_size(degree as isize)],
        }
    }

    pub fn monomial(frame: ScaledFrame, alpha: MultiIndex) -> Self {
        let mut p = Self::zero(frame, alpha.order());
        p.coeffs[alpha.position()] = 1.0;
        p
    }

    /// Monomial `m_i` (graded-lex position `i`) stored at nominal degree `degree`.
    pub fn basis(frame: ScaledFrame, degree: usize, index: usize) -> Self {
        let mut p = Self::zero(frame, degree);
        p.coeffs[index] = 1.0;
        p
    }

    pub fn from_coeffs(frame: ScaledFrame, degree: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(
            coeffs.len(),
            basis_size(degree as isize),
            "coefficient vector length does not match degree {degree}"
        );
        Self {
            frame,
            degree,
            coeffs,
        }
    }

    pub fn frame(&self) -> &ScaledFrame {
        &self.frame
    }

    /// Nominal degree (an upper bound on the true degree).
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: MultiIndex) -> f64 {
        self.coeffs.get(alpha.position()).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.abs()))
    }

    /// Largest absolute coefficient of total degree above `degree`.
    pub fn excess_above(&self, degree: isize) -> f64 {
        let start = basis_size(degree);
        self.coeffs[start.min(self.coeffs.len())..]
            .iter()
            .fold(0.0, |a, c| a.max(c.abs()))
    }

    /// Same polynomial at a different nominal degree; truncates if lower.
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(basis_size(degree as isize), 0.0);
        Self {
            frame: self.frame,
            degree,
            coeffs,
        }
    }

    pub fn evaluate(&self, p: Point) -> f64 {
        let x = self.frame.local(p);
        let mut px = vec![1.0; self.degree + 1];
        let mut py = vec![1.0; self.degree + 1];
        for i in 1..=self.degree {
            px[i] = px[i - 1] * x.x;
            py[i] = py[i - 1] * x.y;
        }
        let mut acc = 0.0;
        let mut pos = 0;
        for d in 0..=self.degree {
            for a in homogeneous(d) {
                acc += self.coeffs[pos] * px[a.x] * py[a.y];
                pos += 1;
            }
        }
        acc
    }

    /// Exact partial derivative `∂^α p`; each differentiation divides by `h_G`.
    pub fn derive(&self, alpha: MultiIndex) -> Self {
        let k = alpha.order();
        if k > self.degree {
            return Self::zero(self.frame, 0);
        }
        let degree = self.degree - k;
        let inv_h = self.frame.scale.powi(-(k as i32));
        let mut out = Self::zero(self.frame, degree);
        for d in 0..=degree {
            for b in homogeneous(d) {
                let src = b + alpha;
                let f = falling_factorial(src.x, alpha.x) * falling_factorial(src.y, alpha.y);
                out.coeffs[b.position()] = self.coeffs[src.position()] * f * inv_h;
            }
        }
        out
    }

    /// `(d·∇)^order p` for a constant direction `d`.
    pub fn directional_derivative(&self, dir: Vector, order: usize) -> Self {
        let weights = directional_weights(&[(dir, order)]);
        let mut out = Self::zero(self.frame, self.degree.saturating_sub(order));
        for (c, w) in weights.iter().enumerate() {
            if *w != 0.0 {
                out.axpy(*w, &self.derive(MultiIndex::new(c, order - c)));
            }
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        let mut out = self.derive(MultiIndex::new(2, 0));
        out.axpy(1.0, &self.derive(MultiIndex::new(0, 2)));
        out
    }

    /// `(-Δ)^m p`, expanded with the binomial theorem.
    pub fn laplacian_power(&self, m: usize) -> Self {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let mut out = Self::zero(self.frame, self.degree.saturating_sub(2 * m));
        for j in 0..=m {
            let w = sign * binomial(m, j);
            out.axpy(w, &self.derive(MultiIndex::new(2 * j, 2 * (m - j))));
        }
        out
    }

    /// All `s`-th partials as a symmetric tensor.
    pub fn grad_tensor(&self, s: usize) -> TensorPoly {
        TensorPoly::new(
            s,
            (0..=s)
                .map(|c| self.derive(MultiIndex::new(c, s - c)))
                .collect(),
        )
    }

    /// `self += a * other`, growing the nominal degree if needed.
    pub fn axpy(&mut self, a: f64, other: &Polynomial) {
        debug_assert_eq!(self.frame, other.frame);
        if other.degree > self.degree {
            *self = self.with_degree(other.degree);
        }
        for (s, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *s += a * o;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            frame: self.frame,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Self {
        debug_assert_eq!(self.frame, other.frame);
        let mut out = Self::zero(self.frame, self.degree + other.degree);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let ai = MultiIndex::from_position(i);
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b != 0.0 {
                    out.coeffs[(ai + MultiIndex::from_position(j)).position()] += a * b;
                }
            }
        }
        out
    }

    /// Restriction to an edge, expanded in the edge's scaled monomials
    /// `s^i`, `s = (x - x_e)·t_e / |e|`.
    pub fn restrict_to_edge(&self, edge: &EdgeFrame) -> EdgePolynomial {
        let x0 = self.frame.local(edge.midpoint);
        let dx = edge.tangent * (edge.length / self.frame.scale);
        // powers of (x0 + s dx) in s
        let px = affine_powers(x0.x, dx.x, self.degree);
        let py = affine_powers(x0.y, dx.y, self.degree);
        let mut out = vec![0.0; self.degree + 1];
        let mut pos = 0;
        for d in 0..=self.degree {
            for a in homogeneous(d) {
                let c = self.coeffs[pos];
                pos += 1;
                if c == 0.0 {
                    continue;
                }
                for (i, u) in px[a.x].iter().enumerate() {
                    for (j, v) in py[a.y].iter().enumerate() {
                        out[i + j] += c * u * v;
                    }
                }
            }
        }
        EdgePolynomial::new(edge.length, out)
    }

    /// The same polynomial expanded in the monomials of another frame.
    pub fn reframe(&self, frame: ScaledFrame) -> Self {
        if frame == self.frame {
            return self.clone();
        }
        let a = frame.scale / self.frame.scale;
        let b = self.frame.local(frame.center);
        let px = affine_powers(b.x, a, self.degree);
        let py = affine_powers(b.y, a, self.degree);
        let mut out = Self::zero(frame, self.degree);
        for (pos, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let alpha = MultiIndex::from_position(pos);
            for (i, u) in px[alpha.x].iter().enumerate() {
                for (j, v) in py[alpha.y].iter().enumerate() {
                    out.coeffs[MultiIndex::new(i, j).position()] += c * u * v;
                }
            }
        }
        out
    }

    /// `∫_K p` with a rule of exactness `deg p`.
    pub fn integrate_over(&self, polygon: &Polygon) -> crate::Result<f64> {
        crate::poly::quadrature::integrate_polygon_fn(polygon, self.degree, |x| self.evaluate(x))
    }

    pub fn integrate_with(&self, quad: &Quadrature) -> f64 {
        quad.integrate(|x| self.evaluate(x))
    }
}

/// Coefficients of `(x0 + s dx)^n` in powers of `s`, for `n = 0..=max`.
fn affine_powers(x0: f64, dx: f64, max: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![1.0]];
    for n in 1..=max {
        let prev = &out[n - 1];
        let mut next = vec![0.0; n + 1];
        for (i, c) in prev.iter().enumerate() {
            next[i] += c * x0;
            next[i + 1] += c * dx;
        }
        out.push(next);
    }
    out
}

/// Expansion of a product of directional derivatives `Π (d_i·∇)^{n_i}` in
/// Cartesian partials: entry `c` is the weight of `∂_x^c ∂_y^{N-c}`, `N = Σ n_i`.
///
/// The same weights give the contraction of a symmetric tensor with
/// `d_1^{⊗n_1} ⊗ d_2^{⊗n_2} ⊗ ...` when indexed by the number of x-slots.
pub fn directional_weights(factors: &[(Vector, usize)]) -> Vec<f64> {
    // polynomial in formal variables X, Y stored by X-exponent (homogeneous)
    let mut acc = vec![1.0];
    for &(d, n) in factors {
        for _ in 0..n {
            let mut next = vec![0.0; acc.len() + 1];
            for (c, w) in acc.iter().enumerate() {
                next[c + 1] += w * d.x;
                next[c] += w * d.y;
            }
            acc = next;
        }
    }
    acc
}
