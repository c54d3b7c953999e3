//! Symmetric tensors with polynomial entries.
//!
//! An order-`s` symmetric tensor over ℝ² is determined by its entries with `c`
//! indices equal to 1 (x) and `s - c` equal to 2 (y); each such entry appears
//! `C(s, c)` times in the full `2^s`-entry tensor.

use crate::geometry::Vector;
use crate::poly::multi_index::binomial;
use crate::poly::polynomial::{directional_weights, Polynomial};

#[derive(Clone, Debug, PartialEq)]
pub struct TensorPoly {
    order: usize,
    components: Vec<Polynomial>,
}

impl TensorPoly {
    pub fn new(order: usize, components: Vec<Polynomial>) -> Self {
        assert_eq!(components.len(), order + 1);
        Self { order, components }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Entry with `x_count` indices equal to 1.
    pub fn component(&self, x_count: usize) -> &Polynomial {
        &self.components[x_count]
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    /// Entry at an explicit index tuple (`0` = x, `1` = y).
    pub fn entry(&self, tuple: &[u8]) -> &Polynomial {
        assert_eq!(tuple.len(), self.order);
        let c = tuple.iter().filter(|&&i| i == 0).count();
        &self.components[c]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    /// Full contraction `τ : σ` over all `2^s` index tuples.
    pub fn contract(&self, other: &TensorPoly) -> Polynomial {
        assert_eq!(self.order, other.order);
        let frame = *self.components[0].frame();
        let mut out = Polynomial::zero(frame, 0);
        for c in 0..=self.order {
            let prod = self.components[c].mul(&other.components[c]);
            out.axpy(binomial(self.order, c), &prod);
        }
        out
    }

    /// `τ · v`, contraction of the last index with a constant vector.
    pub fn dot(&self, v: Vector) -> TensorPoly {
        assert!(self.order > 0);
        let comps = (0..self.order)
            .map(|c| {
                let mut p = self.components[c + 1].scaled(v.x);
                p.axpy(v.y, &self.components[c]);
                p
            })
            .collect();
        TensorPoly::new(self.order - 1, comps)
    }

    /// Full contraction with `a^{⊗na} ⊗ b^{⊗nb}`, `na + nb = order`.
    pub fn contract_frame(&self, a: Vector, na: usize, b: Vector, nb: usize) -> Polynomial {
        assert_eq!(na + nb, self.order);
        let weights = directional_weights(&[(a, na), (b, nb)]);
        let frame = *self.components[0].frame();
        let mut out = Polynomial::zero(frame, 0);
        for (c, w) in weights.iter().enumerate() {
            if *w != 0.0 {
                out.axpy(*w, &self.components[c]);
            }
        }
        out
    }
}
