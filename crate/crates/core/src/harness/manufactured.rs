//! Manufactured solutions with closed-form loads.
//!
//! `sin^p(πt)` is expanded into a finite Fourier series, so every derivative of
//! `u = sin^p(πx) sin^p(πy)` and of `f = (-Δ)^m u` is an exact trigonometric sum.

use std::f64::consts::PI;

use crate::element::{ScalarField, ZeroField};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::poly::{binomial, MultiIndex};

/// `Σ c_j · trig(n_j π t)` with `trig = sin` for odd `p` and `cos` for even `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigSeries {
    cosine: bool,
    terms: Vec<(f64, f64)>,
}

impl TrigSeries {
    /// Expansion of `sin^p(πt)`.
    pub fn sin_power(p: usize) -> Self {
        let scale = 0.5f64.powi(p as i32 - 1);
        let mut terms = Vec::new();
        if p % 2 == 1 {
            let h = (p - 1) / 2;
            for j in 0..=h {
                let sign = if (h - j) % 2 == 0 { 1.0 } else { -1.0 };
                terms.push((sign * scale * binomial(p, j), (p - 2 * j) as f64));
            }
        } else {
            let h = p / 2;
            terms.push((scale * 0.5 * binomial(p, h), 0.0));
            for j in 0..h {
                let sign = if (h - j) % 2 == 0 { 1.0 } else { -1.0 };
                terms.push((sign * scale * binomial(p, j), (p - 2 * j) as f64));
            }
        }
        Self {
            cosine: p % 2 == 0,
            terms,
        }
    }

    /// `d^order/dt^order` at `t`.
    pub fn derivative(&self, order: usize, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, n)| {
                let w = n * PI;
                // derivatives of sin cycle sin, cos, -sin, -cos; cos starts one step later
                let phase = (order + if self.cosine { 1 } else { 0 }) % 4;
                let v = match phase {
                    0 => (w * t).sin(),
                    1 => (w * t).cos(),
                    2 => -(w * t).sin(),
                    _ => -(w * t).cos(),
                };
                c * w.powi(order as i32) * v
            })
            .sum()
    }
}

/// `u(x, y) = sin^p(πx) sin^p(πy)`.
#[derive(Clone, Debug)]
pub struct SinPower {
    series: TrigSeries,
    name: String,
}

impl SinPower {
    pub fn new(p: usize) -> Self {
        Self {
            series: TrigSeries::sin_power(p),
            name: format!("sin{p}"),
        }
    }
}

impl ScalarField for SinPower {
    fn name(&self) -> &str {
        &self.name
    }

    fn derivative(&self, alpha: MultiIndex, x: Point) -> f64 {
        self.series.derivative(alpha.x, x.x) * self.series.derivative(alpha.y, x.y)
    }
}

/// `(-Δ)^m` of a [`SinPower`], `(-1)^m Σ_j C(m, j) u^{(2j, 2m-2j)}`.
#[derive(Clone, Debug)]
pub struct SinPowerLoad {
    series: TrigSeries,
    m: usize,
}

impl ScalarField for SinPowerLoad {
    fn name(&self) -> &str {
        "sin-power load"
    }

    fn derivative(&self, alpha: MultiIndex, x: Point) -> f64 {
        let sign = if self.m % 2 == 0 { 1.0 } else { -1.0 };
        (0..=self.m)
            .map(|j| {
                binomial(self.m, j)
                    * self.series.derivative(2 * j + alpha.x, x.x)
                    * self.series.derivative(2 * (self.m - j) + alpha.y, x.y)
            })
            .sum::<f64>()
            * sign
    }
}

/// Exact solution, its load and the boundary condition it satisfies.
pub struct ManufacturedSolution {
    pub name: String,
    pub m: usize,
    pub u: Box<dyn ScalarField>,
    pub f: Box<dyn ScalarField>,
    /// All normal derivatives up to order `m-1` vanish on `∂(0,1)²`.
    pub homogeneous: bool,
}

impl ManufacturedSolution {
    /// `"sin<p>"` gives `sin^p(πx) sin^p(πy)`, `p >= m`; `"zero"` the trivial solution.
    pub fn by_name(name: &str, m: usize) -> Result<Self> {
        if name == "zero" {
            return Ok(Self {
                name: name.into(),
                m,
                u: Box::new(ZeroField),
                f: Box::new(ZeroField),
                homogeneous: true,
            });
        }
        let p: usize = name
            .strip_prefix("sin")
            .and_then(|s| if s.is_empty() { Some(m) } else { s.parse().ok() })
            .ok_or_else(|| Error::Parameter(format!("unknown solution '{name}'; expected 'sin<p>' or 'zero'")))?;
        if p < m {
            return Err(Error::Parameter(format!(
                "solution sin{p} does not satisfy the order-{m} clamped condition; need p >= {m}"
            )));
        }
        Ok(Self {
            name: format!("sin{p}"),
            m,
            u: Box::new(SinPower::new(p)),
            f: Box::new(SinPowerLoad {
                series: TrigSeries::sin_power(p),
                m,
            }),
            homogeneous: true,
        })
    }

    /// Largest relative mismatch between `f` and `-Δ` of the exact
    /// `(-Δ)^{m-1} u`, the outer Laplacian by central differences.
    pub fn consistency_mismatch(&self, points: &[Point], step: f64) -> f64 {
        let inner = |x: Point| -> f64 {
            let n = self.m - 1;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            (0..=n)
                .map(|j| binomial(n, j) * self.u.derivative(MultiIndex::new(2 * j, 2 * (n - j)), x))
                .sum::<f64>()
                * sign
        };
        let mut worst: f64 = 0.0;
        for &x in points {
            let c = inner(x);
            let lap = (inner(Point::new(x.x + step, x.y))
                + inner(Point::new(x.x - step, x.y))
                + inner(Point::new(x.x, x.y + step))
                + inner(Point::new(x.x, x.y - step))
                - 4.0 * c)
                / (step * step);
            let f = self.f.value(x);
            let mismatch = (-lap - f).abs();
            worst = worst.max(if f == 0.0 { mismatch } else { mismatch / f.abs() });
        }
        worst
    }
}

/// Interior points used for the load consistency check.
pub const CHECK_POINTS: [(f64, f64); 5] = [(0.3, 0.4), (0.27, 0.81), (0.55, 0.2), (0.66, 0.61), (0.9, 0.37)];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_reproduces_sin_powers() {
        for p in 1..=6 {
            let s = TrigSeries::sin_power(p);
            for t in [0.0, 0.13, 0.5, 0.77] {
                let want = (PI * t).sin().powi(p as i32);
                assert!((s.derivative(0, t) - want).abs() < 1e-14, "p={p} t={t}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let s = TrigSeries::sin_power(3);
        let h = 1e-5;
        for order in 0..6 {
            let t = 0.31;
            let fd = (s.derivative(order, t + h) - s.derivative(order, t - h)) / (2.0 * h);
            let exact = s.derivative(order + 1, t);
            assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "order {order}");
        }
    }

    #[test]
    fn load_is_consistent() {
        for m in [3, 4] {
            let sol = ManufacturedSolution::by_name(&format!("sin{m}"), m).unwrap();
            let pts: Vec<Point> = CHECK_POINTS.iter().map(|&(x, y)| Point::new(x, y)).collect();
            assert!(sol.consistency_mismatch(&pts, 1e-3) < 1e-4);
        }
    }

    #[test]
    fn clamped_boundary_conditions() {
        let u = SinPower::new(3);
        for t in [0.0, 0.2, 0.7, 1.0] {
            for (x, y) in [(0.0, t), (1.0, t), (t, 0.0), (t, 1.0)] {
                for j in 0..3 {
                    for alpha in crate::poly::multi_index::homogeneous(j) {
                        assert!(u.derivative(alpha, Point::new(x, y)).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn names() {
        assert_eq!(ManufacturedSolution::by_name("sin", 3).unwrap().name, "sin3");
        assert!(ManufacturedSolution::by_name("sin2", 3).is_err());
        assert!(ManufacturedSolution::by_name("cos", 3).is_err());
        let zero = ManufacturedSolution::by_name("zero", 3).unwrap();
        assert_eq!(zero.f.value(Point::new(0.2, 0.3)), 0.0);
    }
}
