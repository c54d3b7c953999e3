//! Element identity checks and the patch test.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::assembly::{solve_with_boundary, Assembly};
use crate::element::{element_matrices, ZeroField};
use crate::error::Result;
use crate::geometry::Point;
use crate::green::hm_inner_quadrature;
use crate::mesh::{CellGeometry, PolyMesh};
use crate::poly::{basis_size, Polynomial, ScaledFrame};

pub const PROJECTOR_TOL: f64 = 1e-9;
pub const GRAM_TOL: f64 = 1e-9;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-9;
pub const KERNEL_TOL: f64 = 1e-8;
pub const RANK_THRESHOLD: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-10;
pub const PATCH_TOL: f64 = 1e-6;

/// Residuals of one cell for one `(m, k)`.
#[derive(Clone, Debug)]
pub struct CellCheck {
    pub polygon: String,
    pub m: usize,
    pub k: usize,
    /// `‖ΠD - I‖_max`.
    pub projector: f64,
    /// `‖G - BD‖_max / ‖G‖_max`.
    pub gram: f64,
    /// `‖A - Aᵀ‖_max / ‖A‖_max`.
    pub asymmetry: f64,
    /// `λ_min / λ_max`.
    pub min_eigen_ratio: f64,
    /// `‖A D_{m-1}‖_max / ‖A‖_max` over the columns of `ℙ_{m-1}`.
    pub kernel: f64,
    /// Eigenvalues above `1e-8 λ_max`.
    pub rank: usize,
    /// `N_K - dim ℙ_{m-1}`.
    pub expected_rank: usize,
    /// Reduced pairing rows against direct quadrature, relative to the largest entry.
    pub oracle: f64,
}

impl CellCheck {
    /// Names of the identities that fail; rank is reported separately.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !(self.projector <= PROJECTOR_TOL) {
            out.push("Pi*D = I");
        }
        if !(self.gram <= GRAM_TOL) {
            out.push("G = B*D");
        }
        if !(self.asymmetry <= SYMMETRY_TOL) {
            out.push("A symmetric");
        }
        if !(self.min_eigen_ratio >= -PSD_TOL) {
            out.push("A positive semidefinite");
        }
        if !(self.kernel <= KERNEL_TOL) {
            out.push("A kills P_{m-1}");
        }
        if !(self.oracle <= ORACLE_TOL) {
            out.push("pairing oracle");
        }
        out
    }

    pub fn rank_ok(&self) -> bool {
        self.rank == self.expected_rank
    }
}

pub fn check_cell(name: &str, geometry: &CellGeometry, m: usize, k: usize) -> Result<CellCheck> {
    let e = element_matrices(geometry, m, k, &ZeroField)?;
    let a = &e.a;
    let scale = a.amax();
    let eig = a.clone().symmetric_eigen().eigenvalues;
    let lmax = eig.max();
    let n_low = e.layout.kernel_dim();
    let kernel = (a * e.d.columns(0, n_low)).amax() / scale;

    let n_k = e.layout.poly_dim();
    let basis: Vec<Polynomial> = (0..n_k).map(|j| Polynomial::basis(e.layout.frame(), k, j)).collect();
    let reduced = e.b.rows(n_low, n_k - n_low) * &e.d;
    let mut oracle = DMatrix::zeros(n_k - n_low, n_k);
    for r in n_low..n_k {
        for s in 0..n_k {
            oracle[(r - n_low, s)] = hm_inner_quadrature(&geometry.polygon, m, &basis[r], &basis[s])?;
        }
    }
    Ok(CellCheck {
        polygon: name.to_string(),
        m,
        k,
        projector: e.projector_residual(),
        gram: e.gram_residual(),
        asymmetry: (a - a.transpose()).amax() / scale,
        min_eigen_ratio: eig.min() / lmax,
        kernel,
        rank: eig.iter().filter(|&&l| l > RANK_THRESHOLD * lmax).count(),
        expected_rank: e.layout.len() - n_low,
        oracle: (reduced - &oracle).amax() / oracle.amax(),
    })
}

/// Runs [`check_cell`] on every polygon for every `(m, k)` pair, in parallel.
pub fn check_element(polygons: &[(String, CellGeometry)], params: &[(usize, usize)]) -> Result<Vec<CellCheck>> {
    let jobs: Vec<_> = params
        .iter()
        .flat_map(|&(m, k)| polygons.iter().map(move |(n, g)| (n, g, m, k)))
        .collect();
    jobs.par_iter().map(|(n, g, m, k)| check_cell(n, g, *m, *k)).collect()
}

#[derive(Clone, Debug)]
pub struct PatchReport {
    /// `‖x - χ(p)‖_∞ / ‖χ(p)‖_∞`.
    pub error: f64,
    pub residual: f64,
    pub ndofs: usize,
    pub nfree: usize,
}

impl PatchReport {
    pub fn passed(&self) -> bool {
        self.error <= PATCH_TOL
    }
}

/// Random polynomial of the given degree around the mesh bounding-box centre.
pub fn random_polynomial(mesh: &PolyMesh, degree: usize, seed: u64) -> Polynomial {
    let (mut lo, mut hi) = (mesh.vertices()[0], mesh.vertices()[0]);
    for p in mesh.vertices() {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let frame = ScaledFrame::new(Point::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)), (hi - lo).norm());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..basis_size(degree as isize)).map(|_| rng.random_range(-1.0..1.0)).collect();
    Polynomial::from_coeffs(frame, degree, coeffs)
}

/// Solves with `f = (-Δ)^m p` and the trace of `p`, compares against `χ(p)`.
pub fn patch_test(mesh: &PolyMesh, m: usize, k: usize, degree: usize, seed: u64) -> Result<PatchReport> {
    let p = random_polynomial(mesh, degree, seed);
    let f = p.laplacian_power(m);
    let assembly = Assembly::new(mesh, m, k, &f)?;
    let (x, report) = solve_with_boundary(&assembly, &p)?;
    let exact = assembly.interpolate(&p)?;
    Ok(PatchReport {
        error: (&x - &exact).amax() / exact.amax(),
        residual: report.residual,
        ndofs: assembly.map.len(),
        nfree: assembly.map.num_free(),
    })
}
