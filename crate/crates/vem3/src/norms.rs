//! Discrete L2 and H1 error norms against an exact solution, evaluated on the
//! stored element projections, plus convergence-rate fitting.
//!
//! Both norms are broken norms of u - P u_h: per element the projected
//! solution is the linear polynomial with coefficients P* u|_K, integrated
//! with a degree-4 rule, and the per-element contributions are combined as
//! sqrt of the sum of squares.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::assembly::Monomials;
use crate::error::Result;
use crate::geometry::element_geometry;
use crate::mesh::PolyhedralMesh;
use crate::quadrature::integral_polyhedron;

/// One row of a convergence study: DOF count, mesh size h = (1/NT)^(1/3) and
/// both error norms.
#[derive(Debug, Clone, Copy)]
pub struct StudyRecord {
    pub dofs: usize,
    pub h: f64,
    pub err_l2: f64,
    pub err_h1: f64,
}

/// Discrete L2 error ||u - P u_h|| over the mesh.
pub fn l2_error(
    mesh: &PolyhedralMesh,
    solution: &[f64],
    projections: &[DMatrix<f64>],
    elem_dofs: &[Vec<usize>],
    exact: &(dyn Fn(f64, f64, f64) -> f64 + Sync),
) -> Result<f64> {
    let mut total = 0.0;
    for element in 0..mesh.n_elements() {
        let geometry = element_geometry(mesh, element)?;
        let monomials = Monomials::new(&geometry);
        let local = DVector::from_iterator(
            elem_dofs[element].len(),
            elem_dofs[element].iter().map(|&d| solution[d]),
        );
        let coeffs = &projections[element] * local;
        let contribution = integral_polyhedron(
            |x, y, z| {
                let m = monomials.eval(x, y, z);
                let diff = exact(x, y, z) - coeffs.dot(&m);
                DVector::from_element(1, diff * diff)
            },
            4,
            mesh,
            element,
        )?;
        total += contribution[0];
    }
    Ok(total.sqrt())
}

/// Discrete H1 seminorm error |u - P u_h| over the mesh. The projected
/// gradient is constant per element.
pub fn h1_error(
    mesh: &PolyhedralMesh,
    solution: &[f64],
    projections: &[DMatrix<f64>],
    elem_dofs: &[Vec<usize>],
    exact_gradient: &(dyn Fn(f64, f64, f64) -> [f64; 3] + Sync),
) -> Result<f64> {
    let mut total = 0.0;
    for element in 0..mesh.n_elements() {
        let geometry = element_geometry(mesh, element)?;
        let local = DVector::from_iterator(
            elem_dofs[element].len(),
            elem_dofs[element].iter().map(|&d| solution[d]),
        );
        let coeffs = &projections[element] * local;
        let grad = Vector3::new(coeffs[1], coeffs[2], coeffs[3]) / geometry.diameter;
        let contribution = integral_polyhedron(
            |x, y, z| {
                let g = exact_gradient(x, y, z);
                let dx = g[0] - grad.x;
                let dy = g[1] - grad.y;
                let dz = g[2] - grad.z;
                DVector::from_element(1, dx * dx + dy * dy + dz * dz)
            },
            4,
            mesh,
            element,
        )?;
        total += contribution[0];
    }
    Ok(total.sqrt())
}

/// Least-squares slopes of log(err) against log(h) for both norms.
pub fn fit_rates(records: &[StudyRecord]) -> (f64, f64) {
    let l2 = fit_slope(records.iter().map(|r| (r.h, r.err_l2)));
    let h1 = fit_slope(records.iter().map(|r| (r.h, r.err_h1)));
    (l2, h1)
}

fn fit_slope<I: Iterator<Item = (f64, f64)>>(points: I) -> f64 {
    let data: Vec<(f64, f64)> = points
        .filter(|&(h, e)| h > 0.0 && e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if data.len() < 2 {
        return f64::NAN;
    }
    let n = data.len() as f64;
    let sx: f64 = data.iter().map(|p| p.0).sum();
    let sy: f64 = data.iter().map(|p| p.1).sum();
    let sxx: f64 = data.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = data.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
