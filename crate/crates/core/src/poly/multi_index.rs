//! Two-dimensional multi-indices in graded lexicographic order.
//!
//! The order is: total degree ascending, then the x-exponent descending.
//! For degree 2 that gives `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2)`.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct MultiIndex {
    pub x: usize,
    pub y: usize,
}

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex { x: 0, y: 0 };

    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    pub const fn order(self) -> usize {
        self.x + self.y
    }

    /// Position of this index in the graded-lex enumeration.
    pub const fn position(self) -> usize {
        let d = self.order();
        d * (d + 1) / 2 + self.y
    }

    /// Inverse of [`MultiIndex::position`].
    pub fn from_position(pos: usize) -> Self {
        let mut d = 0;
        while (d + 1) * (d + 2) / 2 <= pos {
            d += 1;
        }
        let y = pos - d * (d + 1) / 2;
        Self { x: d - y, y }
    }

    pub fn checked_sub(self, other: MultiIndex) -> Option<MultiIndex> {
        Some(MultiIndex {
            x: self.x.checked_sub(other.x)?,
            y: self.y.checked_sub(other.y)?,
        })
    }
}

impl std::ops::Add for MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: MultiIndex) -> MultiIndex {
        MultiIndex::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Number of bivariate monomials of total degree at most `degree`; zero for negative degree.
pub fn basis_size(degree: isize) -> usize {
    if degree < 0 {
        0
    } else {
        let d = degree as usize;
        (d + 1) * (d + 2) / 2
    }
}

/// Number of univariate monomials of degree at most `degree`; zero for negative degree.
pub fn edge_basis_size(degree: isize) -> usize {
    if degree < 0 {
        0
    } else {
        degree as usize + 1
    }
}

/// All multi-indices with `|alpha| <= degree`, graded-lex.
pub fn enumerate_multiindices(degree: isize) -> Vec<MultiIndex> {
    if degree < 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(basis_size(degree));
    for d in 0..=degree as usize {
        out.extend(homogeneous(d));
    }
    out
}

/// Multi-indices of order exactly `order`, x-exponent descending.
pub fn homogeneous(order: usize) -> impl Iterator<Item = MultiIndex> {
    (0..=order).map(move |y| MultiIndex::new(order - y, y))
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Falling factorial `n (n-1) ... (n-k+1)`; zero when `k > n`.
pub fn falling_factorial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).map(|i| (n - i) as f64).product()
}
