//! Global assembly, boundary conditions, the direct solve and error norms.

mod dofmap;
mod sparse;

use std::fmt::Write as _;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::element::{dof_evaluate, element_matrices, ElementMatrices, ScalarField};
use crate::error::{Error, Result};
use crate::mesh::{format_f64, PolyMesh};
use crate::poly::{binomial, MultiIndex, Quadrature};

pub use dofmap::{build_dof_map, DofLink, GlobalDofMap};
pub use sparse::{reverse_cuthill_mckee, CsrMatrix, EnvelopeCholesky};

/// Minimum quadrature degree for error integrals.
pub const ERROR_QUADRATURE_DEGREE: usize = 20;

/// Element matrices of every cell and their scatter into global storage.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub map: GlobalDofMap,
    pub elements: Vec<ElementMatrices>,
    /// Global matrix before boundary elimination.
    pub matrix: CsrMatrix,
    /// Global load before boundary elimination.
    pub rhs: DVector<f64>,
}

/// Reduced system on the free dofs.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: DVector<f64>,
    /// Global index of each unknown.
    pub free: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub x: DVector<f64>,
    /// `‖A x - b‖ / ‖b‖`, or `‖A x‖` when `b = 0`.
    pub residual: f64,
}

impl Assembly {
    /// Builds all element matrices (in parallel) and scatters them in cell order.
    pub fn new(mesh: &PolyMesh, m: usize, k: usize, f: &dyn ScalarField) -> Result<Self> {
        let map = GlobalDofMap::new(mesh, m, k)?;
        let elements = (0..mesh.num_cells())
            .into_par_iter()
            .map(|c| element_matrices(&mesh.cell_geometry(c), m, k, f).map_err(|e| e.in_cell(c)))
            .collect::<Result<Vec<_>>>()?;

        let mut triplets = Vec::new();
        let mut rhs = DVector::zeros(map.len());
        for (c, e) in elements.iter().enumerate() {
            let links = map.links(c);
            for (i, li) in links.iter().enumerate() {
                rhs[li.global] += li.factor() * e.rhs[i];
                for (j, lj) in links.iter().enumerate() {
                    triplets.push((li.global, lj.global, li.factor() * lj.factor() * e.a[(i, j)]));
                }
            }
        }
        let matrix = CsrMatrix::from_triplets(map.len(), triplets);
        Ok(Self {
            map,
            elements,
            matrix,
            rhs,
        })
    }

    /// Eliminates the boundary dofs, fixing them to `boundary` (zero if `None`).
    pub fn system(&self, boundary: Option<&DVector<f64>>) -> LinearSystem {
        let free = self.map.free().to_vec();
        let (matrix, coupling) = self.matrix.split(&free);
        let mut rhs = DVector::from_iterator(free.len(), free.iter().map(|&g| self.rhs[g]));
        if let Some(values) = boundary {
            for (r, j, v) in coupling {
                rhs[r] -= v * values[j];
            }
        }
        LinearSystem { matrix, rhs, free }
    }

    /// Global vector from the free solution and the boundary values.
    pub fn expand(&self, system: &LinearSystem, x: &DVector<f64>, boundary: Option<&DVector<f64>>) -> DVector<f64> {
        let mut out = DVector::zeros(self.map.len());
        if let Some(values) = boundary {
            for (g, &b) in self.map.boundary_mask().iter().enumerate() {
                if b {
                    out[g] = values[g];
                }
            }
        }
        for (i, &g) in system.free.iter().enumerate() {
            out[g] = x[i];
        }
        out
    }

    /// Global dofs of `field`.
    pub fn interpolate(&self, field: &dyn ScalarField) -> Result<DVector<f64>> {
        let locals = self
            .elements
            .par_iter()
            .map(|e| dof_evaluate(&e.layout, field))
            .collect::<Result<Vec<_>>>()?;
        let mut out = DVector::zeros(self.map.len());
        for (c, local) in locals.iter().enumerate() {
            for (l, v) in self.map.links(c).iter().zip(local.iter()) {
                out[l.global] = v / l.factor();
            }
        }
        Ok(out)
    }

    /// `Σ_K x_Kᵀ A_K x_K`.
    pub fn energy_by_elements(&self, x: &DVector<f64>) -> f64 {
        self.elements
            .iter()
            .enumerate()
            .map(|(c, e)| {
                let xk = DVector::from_vec(self.map.gather(c, x.as_slice()));
                xk.dot(&(&e.a * &xk))
            })
            .sum()
    }

    /// Per-cell coefficients of `Π^K u_h` in the cell's scaled monomials.
    pub fn projections(&self, x: &DVector<f64>) -> Vec<crate::poly::Polynomial> {
        self.elements
            .iter()
            .enumerate()
            .map(|(c, e)| e.project(&DVector::from_vec(self.map.gather(c, x.as_slice()))))
            .collect()
    }

    /// `{"dofs": [...], "cells": [[...], ...]}` with 17-digit decimals.
    pub fn solution_json(&self, x: &DVector<f64>) -> String {
        let list = |v: &[f64]| {
            let items: Vec<String> = v.iter().map(|x| format_f64(*x)).collect();
            format!("[{}]", items.join(", "))
        };
        let mut out = String::new();
        let _ = write!(out, "{{\"m\": {}, \"k\": {}, \"dofs\": {}, \"cells\": [", self.map.m(), self.map.k(), list(x.as_slice()));
        for (c, p) in self.projections(x).iter().enumerate() {
            if c > 0 {
                out.push_str(", ");
            }
            out.push_str(&list(p.coeffs()));
        }
        out.push_str("]}");
        out
    }
}

/// Assembles the homogeneous Dirichlet system.
pub fn assemble(mesh: &PolyMesh, m: usize, k: usize, f: &dyn ScalarField) -> Result<LinearSystem> {
    Ok(Assembly::new(mesh, m, k, f)?.system(None))
}

/// Direct solve by envelope Cholesky under RCM ordering.
pub fn solve(system: &LinearSystem) -> Result<SolveReport> {
    if system.rhs.is_empty() {
        return Ok(SolveReport {
            x: DVector::zeros(0),
            residual: 0.0,
        });
    }
    let factor = EnvelopeCholesky::factor(&system.matrix).map_err(|e| match e {
        Error::NonPositivePivot { index, value } => Error::NonPositivePivot {
            index: system.free[index],
            value,
        },
        e => e,
    })?;
    let x = factor.solve(&system.rhs);
    let r = system.matrix.mul_vec(&x) - &system.rhs;
    let b = system.rhs.norm();
    let residual = if b > 0.0 { r.norm() / b } else { r.norm() };
    Ok(SolveReport { x, residual })
}

/// Homogeneous problem; returns the global dof vector and the solve report.
pub fn solve_homogeneous(assembly: &Assembly) -> Result<(DVector<f64>, SolveReport)> {
    let system = assembly.system(None);
    let report = solve(&system)?;
    Ok((assembly.expand(&system, &report.x, None), report))
}

/// Boundary dofs set to those of `g`, interior dofs from the reduced system.
pub fn inhomogeneous_bc_solve(
    mesh: &PolyMesh,
    m: usize,
    k: usize,
    f: &dyn ScalarField,
    g: &dyn ScalarField,
) -> Result<DVector<f64>> {
    let assembly = Assembly::new(mesh, m, k, f)?;
    Ok(solve_with_boundary(&assembly, g)?.0)
}

pub fn solve_with_boundary(assembly: &Assembly, g: &dyn ScalarField) -> Result<(DVector<f64>, SolveReport)> {
    let values = assembly.interpolate(g)?;
    let system = assembly.system(Some(&values));
    let report = solve(&system)?;
    Ok((assembly.expand(&system, &report.x, Some(&values)), report))
}

/// `e_s = (Σ_K |u - Π^K u_h|²_{s,K})^{1/2}` for `s = 0..=m`.
pub fn error_norms(assembly: &Assembly, x: &DVector<f64>, u: &dyn ScalarField) -> Vec<f64> {
    let m = assembly.map.m();
    let k = assembly.map.k();
    let projections = assembly.projections(x);
    let per_cell: Vec<Vec<f64>> = assembly
        .elements
        .par_iter()
        .zip(projections.par_iter())
        .map(|(e, p)| {
            let quad = Quadrature::polygon(&e.layout.geometry().polygon, ERROR_QUADRATURE_DEGREE.max(2 * k));
            let derivs: Vec<Vec<(f64, crate::poly::Polynomial)>> = (0..=m)
                .map(|s| {
                    (0..=s)
                        .map(|y| (binomial(s, y), p.derive(MultiIndex::new(s - y, y))))
                        .collect()
                })
                .collect();
            (0..=m)
                .map(|s| {
                    quad.integrate(|pt| {
                        derivs[s]
                            .iter()
                            .enumerate()
                            .map(|(y, (w, dp))| {
                                let d = u.derivative(MultiIndex::new(s - y, y), pt) - dp.evaluate(pt);
                                w * d * d
                            })
                            .sum()
                    })
                })
                .collect()
        })
        .collect();
    (0..=m)
        .map(|s| per_cell.iter().map(|v| v[s]).sum::<f64>().max(0.0).sqrt())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::ZeroField;
    use crate::mesh::{make_grid, MeshKind};
    use crate::poly::{Polynomial, ScaledFrame};
    use crate::geometry::Point;

    #[test]
    fn assembled_matrix_is_symmetric() {
        let mesh = make_grid(MeshKind::PolygonsPerturbed, 3, 0.2).unwrap();
        let asm = Assembly::new(&mesh, 3, 4, &ZeroField).unwrap();
        assert!(asm.matrix.asymmetry() <= 1e-12);
        let sys = asm.system(None);
        assert_eq!(sys.matrix.dim(), asm.map.num_free());
    }

    #[test]
    fn zero_load_gives_zero_solution() {
        let mesh = make_grid(MeshKind::Squares, 3, 0.0).unwrap();
        let asm = Assembly::new(&mesh, 3, 3, &ZeroField).unwrap();
        let (x, report) = solve_homogeneous(&asm).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
        assert_eq!(report.residual, 0.0);
    }

    #[test]
    fn single_cell_kernel_matches_element() {
        let mesh = make_grid(MeshKind::Squares, 1, 0.0).unwrap();
        let asm = Assembly::new(&mesh, 3, 4, &ZeroField).unwrap();
        let dense = asm.matrix.to_dense();
        let eig = dense.symmetric_eigen().eigenvalues;
        let lmax = eig.max();
        let null = eig.iter().filter(|&&l| l <= 1e-8 * lmax).count();
        assert_eq!(null, 6);
    }

    #[test]
    fn interpolating_a_polynomial_is_consistent_across_cells() {
        let mesh = make_grid(MeshKind::Triangles, 3, 0.0).unwrap();
        let p = Polynomial::from_coeffs(
            ScaledFrame::new(Point::new(0.5, 0.5), 1.0),
            2,
            vec![0.3, -1.0, 2.0, 0.5, 0.25, -0.75],
        );
        let asm = Assembly::new(&mesh, 3, 4, &ZeroField).unwrap();
        let x = asm.interpolate(&p).unwrap();
        for c in 0..mesh.num_cells() {
            let local = dof_evaluate(&asm.elements[c].layout, &p).unwrap();
            let gathered = asm.map.gather(c, x.as_slice());
            for (a, b) in local.iter().zip(&gathered) {
                assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
        let norms = error_norms(&asm, &x, &p);
        assert!(norms.iter().all(|&e| e < 1e-10), "{norms:?}");
    }
}
