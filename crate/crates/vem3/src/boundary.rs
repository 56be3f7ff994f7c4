//! Boundary conditions: Neumann face loads via the local chart and Dirichlet
//! elimination by lifting.

use nalgebra::DVector;

use crate::assembly::LinearSystem;
use crate::error::{Result, VemError};
use crate::face_projection::{face_monomials, FaceProjection};
use crate::mesh::{BoundaryStruct, PolyhedralMesh};
use crate::quadrature::integral_polygon;
use crate::sparse::CsrMatrix;

pub type ScalarField = Box<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type VectorField = Box<dyn Fn(f64, f64, f64) -> [f64; 3] + Send + Sync>;

/// Problem data of the Poisson model problem. The Neumann datum is derived
/// from the gradient field as g_N = grad u . n_f, so callers never provide
/// per-face normals.
pub struct PdeData {
    /// Applied load r(x, y, z).
    pub load: ScalarField,
    /// Exact solution, when known (enables error norms).
    pub exact: Option<ScalarField>,
    /// Gradient of the exact solution; dotted with outward normals for
    /// Neumann data.
    pub gradient: VectorField,
    /// Dirichlet datum g_D.
    pub dirichlet: ScalarField,
}

/// Add the Neumann face loads (P*_f)^T int_f g_N m_f to the right-hand side.
/// A face integral is evaluated in the chart the stored projection was
/// computed in, so coefficients and moments always match.
pub fn apply_neumann(
    system: &mut LinearSystem,
    _mesh: &PolyhedralMesh,
    bd: &BoundaryStruct,
    face_table: &[FaceProjection],
    pde: &PdeData,
) -> Result<()> {
    for &face_id in &bd.neumann_face_idx {
        let fp = face_table
            .get(face_id)
            .ok_or(VemError::MissingFaceProjection(face_id))?;
        let chart = &fp.chart;
        let normal = chart.normal();
        let moments = integral_polygon(
            |s, t| {
                let p = chart.to_3d(s, t);
                let g = (pde.gradient)(p.x, p.y, p.z);
                let gn = g[0] * normal.x + g[1] * normal.y + g[2] * normal.z;
                let m = face_monomials(chart, s, t);
                DVector::from_vec(vec![gn * m[0], gn * m[1], gn * m[2]])
            },
            3,
            &chart.vertices,
        )?;
        let loads = fp.coeffs.transpose() * moments;
        for (k, &vertex) in fp.vertices.iter().enumerate() {
            system.rhs[vertex] += loads[k];
        }
    }
    Ok(())
}

/// Reduced system on the free (non-Dirichlet) degrees of freedom.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Ascending global indices of the free DOFs.
    pub free_dofs: Vec<usize>,
}

impl ReducedSystem {
    /// Write the solved free values back into the lifted solution vector.
    pub fn scatter_solution(&self, x: &[f64], solution: &mut [f64]) {
        for (k, &dof) in self.free_dofs.iter().enumerate() {
            solution[dof] = x[k];
        }
    }
}

/// Eliminate the Dirichlet DOFs by lifting: preset u to g_D on Dirichlet
/// nodes, move matrix * u to the right-hand side and restrict the system to
/// the complement. Returns the reduced system and the lifted solution
/// template.
pub fn apply_dirichlet(
    system: &LinearSystem,
    mesh: &PolyhedralMesh,
    bd: &BoundaryStruct,
    pde: &PdeData,
) -> Result<(ReducedSystem, Vec<f64>)> {
    if bd.dirichlet_nodes.is_empty() {
        return Err(VemError::PureNeumann);
    }
    let n = mesh.n_nodes();
    let mut template = vec![0.0; n];
    let mut fixed = vec![false; n];
    for &d in &bd.dirichlet_nodes {
        let p = mesh.nodes[d];
        template[d] = (pde.dirichlet)(p.x, p.y, p.z);
        fixed[d] = true;
    }
    let lifted = system.matrix.mul_vec(&template);
    let free_dofs: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
    let rhs: Vec<f64> = free_dofs
        .iter()
        .map(|&i| system.rhs[i] - lifted[i])
        .collect();
    let matrix = system.matrix.submatrix(&free_dofs);
    Ok((
        ReducedSystem {
            matrix,
            rhs,
            free_dofs,
        },
        template,
    ))
}
