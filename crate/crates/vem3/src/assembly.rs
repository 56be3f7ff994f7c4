//! Per-element elliptic projection, stabilized local stiffness, local load and
//! global sparse assembly.
//!
//! The element space is projected onto the scaled monomials m_1 = 1,
//! m_2 = (x - x_K)/h_K, m_3 = (y - y_K)/h_K, m_4 = (z - z_K)/h_K. The boundary
//! integrals reduce to the per-face integrals of the projected face basis, so
//! the face projection table is all that is needed to assemble B.

use nalgebra::{DMatrix, DVector, Matrix4, Vector3, Vector4};

use crate::boundary::PdeData;
use crate::error::{Result, VemError};
use crate::face_projection::{face_integral_of_projection, FaceProjection};
use crate::geometry::{element_geometry, face_normal, ElementGeometry};
use crate::mesh::{MeshTopology, PolyhedralMesh};
use crate::quadrature::integral_polyhedron;
use crate::sparse::{CsrMatrix, TripletMatrix};

/// Scaled monomial basis of one element.
#[derive(Debug, Clone, Copy)]
pub struct Monomials {
    pub centroid: Vector3<f64>,
    pub diameter: f64,
}

impl Monomials {
    pub fn new(geometry: &ElementGeometry) -> Self {
        Monomials {
            centroid: geometry.centroid,
            diameter: geometry.diameter,
        }
    }

    pub fn eval(&self, x: f64, y: f64, z: f64) -> Vector4<f64> {
        Vector4::new(
            1.0,
            (x - self.centroid.x) / self.diameter,
            (y - self.centroid.y) / self.diameter,
            (z - self.centroid.z) / self.diameter,
        )
    }

    /// Constant gradients, one row per monomial.
    pub fn gradients(&self) -> [Vector3<f64>; 4] {
        let h = self.diameter;
        [
            Vector3::zeros(),
            Vector3::new(1.0 / h, 0.0, 0.0),
            Vector3::new(0.0, 1.0 / h, 0.0),
            Vector3::new(0.0, 0.0, 1.0 / h),
        ]
    }
}

/// Projection matrices of one element. DOFs are the element's distinct
/// vertices in ascending global order.
#[derive(Debug, Clone)]
pub struct ElementMatrices {
    /// Ascending global vertex indices (the assembly index of the element).
    pub dofs: Vec<usize>,
    pub geometry: ElementGeometry,
    /// D: n x 4 monomial values at the vertices.
    pub transition: DMatrix<f64>,
    /// B: 4 x n boundary integrals int_K grad m . grad phi.
    pub grad_moments: DMatrix<f64>,
    /// B~: B with the first row replaced by the vertex average 1/n.
    pub grad_moments_constrained: DMatrix<f64>,
    /// G = B D.
    pub gram: Matrix4<f64>,
    /// G~ = B~ D.
    pub gram_constrained: Matrix4<f64>,
    /// 4 x n projection coefficients (DOF values -> monomial coefficients).
    pub proj_coeffs: DMatrix<f64>,
    /// n x n projection in DOF space, D * proj_coeffs.
    pub proj_dofs: DMatrix<f64>,
}

/// Quadrature scheme for the element load vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsScheme {
    /// One-point approximation |K| r(x_K) (1,0,0,0).
    OnePoint,
    /// Degree-3 Gauss rule on the tetrahedral decomposition.
    Quad3,
}

impl std::str::FromStr for RhsScheme {
    type Err = VemError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "onepoint" => Ok(RhsScheme::OnePoint),
            "quad3" => Ok(RhsScheme::Quad3),
            other => Err(VemError::Config(format!(
                "unknown rhs scheme '{other}' (expected onepoint or quad3)"
            ))),
        }
    }
}

/// Elliptic projection of one element.
pub fn element_projection(
    mesh: &PolyhedralMesh,
    topology: &MeshTopology,
    face_table: &[FaceProjection],
    element: usize,
) -> Result<ElementMatrices> {
    let dofs = mesh.element_vertices(element);
    let n = dofs.len();
    let geometry = element_geometry(mesh, element)?;
    let monomials = Monomials::new(&geometry);

    let mut transition = DMatrix::zeros(n, 4);
    for (i, &v) in dofs.iter().enumerate() {
        let p = mesh.nodes[v];
        transition.set_row(i, &monomials.eval(p.x, p.y, p.z).transpose());
    }

    let gradients = monomials.gradients();
    let mut grad_moments = DMatrix::zeros(4, n);
    for (local_face, face) in mesh.elements[element].iter().enumerate() {
        let face_id = topology.elem2face[element][local_face];
        let fp = face_table
            .get(face_id)
            .ok_or(VemError::MissingFaceProjection(face_id))?;
        let points = mesh.face_points(face);
        let normal = face_normal(&points)?;
        let integrals = face_integral_of_projection(fp);
        for (col, &global) in fp.vertices.iter().enumerate() {
            let slot = dofs
                .binary_search(&global)
                .expect("face vertex belongs to the element");
            for (row, grad) in gradients.iter().enumerate() {
                grad_moments[(row, slot)] += grad.dot(&normal) * integrals[col];
            }
        }
    }

    let mut grad_moments_constrained = grad_moments.clone();
    for i in 0..n {
        grad_moments_constrained[(0, i)] = 1.0 / n as f64;
    }

    let gram = Matrix4::from_iterator((&grad_moments * &transition).iter().copied());
    let gram_constrained =
        Matrix4::from_iterator((&grad_moments_constrained * &transition).iter().copied());

    let proj_coeffs = gram_constrained
        .lu()
        .solve(&grad_moments_constrained)
        .ok_or_else(|| VemError::DegenerateElement {
            element,
            reason: "singular projection system".to_string(),
        })?;
    let proj_dofs = &transition * &proj_coeffs;

    Ok(ElementMatrices {
        dofs,
        geometry,
        transition,
        grad_moments,
        grad_moments_constrained,
        gram,
        gram_constrained,
        proj_coeffs,
        proj_dofs,
    })
}

/// Stabilized local stiffness matrix
/// A_K = P*^T G P* + h_K (I - P)^T (I - P).
pub fn local_stiffness(em: &ElementMatrices) -> DMatrix<f64> {
    let n = em.dofs.len();
    let consistency = em.proj_coeffs.transpose() * em.gram * &em.proj_coeffs;
    let residual = DMatrix::identity(n, n) - &em.proj_dofs;
    let stability = residual.transpose() * &residual * em.geometry.diameter;
    let ak = consistency + stability;
    // Make the roundoff-level asymmetry of the consistency product vanish.
    0.5 * (&ak + ak.transpose())
}

/// Local load vector f_K = P*^T int_K r m dx with the requested quadrature.
pub fn local_load(
    mesh: &PolyhedralMesh,
    element: usize,
    em: &ElementMatrices,
    pde: &PdeData,
    scheme: RhsScheme,
) -> Result<DVector<f64>> {
    let monomials = Monomials::new(&em.geometry);
    let moments = match scheme {
        RhsScheme::OnePoint => {
            let c = em.geometry.centroid;
            let mut v = DVector::zeros(4);
            v[0] = em.geometry.volume * (pde.load)(c.x, c.y, c.z);
            v
        }
        RhsScheme::Quad3 => integral_polyhedron(
            |x, y, z| {
                let m = monomials.eval(x, y, z);
                let r = (pde.load)(x, y, z);
                DVector::from_iterator(4, m.iter().map(|mi| mi * r))
            },
            3,
            mesh,
            element,
        )?,
    };
    Ok(em.proj_coeffs.transpose() * moments)
}

/// Assembled global system plus the per-element projections needed for the
/// error norms.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Projection coefficient matrix of each element.
    pub projections: Vec<DMatrix<f64>>,
    /// Assembly index (ascending vertex list) of each element.
    pub elem_dofs: Vec<Vec<usize>>,
}

/// Assemble the global stiffness matrix and load vector element by element.
pub fn assemble(
    mesh: &PolyhedralMesh,
    topology: &MeshTopology,
    face_table: &[FaceProjection],
    pde: &PdeData,
    scheme: RhsScheme,
) -> Result<LinearSystem> {
    let n = mesh.n_nodes();
    let mut triplets = TripletMatrix::with_capacity(n, 64 * mesh.n_elements());
    let mut rhs = vec![0.0; n];
    let mut projections = Vec::with_capacity(mesh.n_elements());
    let mut elem_dofs = Vec::with_capacity(mesh.n_elements());

    for element in 0..mesh.n_elements() {
        let em = element_projection(mesh, topology, face_table, element)?;
        let ak = local_stiffness(&em);
        let fk = local_load(mesh, element, &em, pde, scheme)?;
        for (i, &gi) in em.dofs.iter().enumerate() {
            rhs[gi] += fk[i];
            for (j, &gj) in em.dofs.iter().enumerate() {
                triplets.push(gi, gj, ak[(i, j)]);
            }
        }
        projections.push(em.proj_coeffs);
        elem_dofs.push(em.dofs);
    }

    Ok(LinearSystem {
        matrix: triplets.to_csr(),
        rhs,
        projections,
        elem_dofs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::PdeData;
    use crate::face_projection::build_face_projection_table;
    use crate::mesh::{build_topology, generate_hex_mesh, generate_tet_mesh, PolyhedralMesh};
    use approx::assert_relative_eq;

    pub(crate) fn setup(
        mesh: &PolyhedralMesh,
    ) -> (crate::mesh::MeshTopology, Vec<FaceProjection>) {
        let topo = build_topology(mesh).unwrap();
        let table = build_face_projection_table(mesh, &topo).unwrap();
        (topo, table)
    }

    fn zero_pde() -> PdeData {
        PdeData {
            load: Box::new(|_, _, _| 0.0),
            exact: None,
            gradient: Box::new(|_, _, _| [0.0, 0.0, 0.0]),
            dirichlet: Box::new(|_, _, _| 0.0),
        }
    }

    fn kuhn_tet() -> PolyhedralMesh {
        use nalgebra::Vector3;
        PolyhedralMesh {
            nodes: vec![
                Vector3::new(0.0, 0.0, 0.0),
                Vector3::new(1.0, 0.0, 0.0),
                Vector3::new(1.0, 1.0, 0.0),
                Vector3::new(1.0, 1.0, 1.0),
            ],
            elements: vec![vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]]],
        }
    }

    #[test]
    fn monomials_at_centroid_and_vertices() {
        let mesh = generate_hex_mesh(1);
        let geom = element_geometry(&mesh, 0).unwrap();
        let m = Monomials::new(&geom);
        let at_c = m.eval(geom.centroid.x, geom.centroid.y, geom.centroid.z);
        assert_eq!(at_c, Vector4::new(1.0, 0.0, 0.0, 0.0));

        let h = 3.0_f64.sqrt();
        let at_origin = m.eval(0.0, 0.0, 0.0);
        for k in 1..4 {
            assert_relative_eq!(at_origin[k], -0.5 / h, epsilon = 1e-14);
        }

        let norms: Vec<f64> = m.gradients().iter().map(|g| g.norm()).collect();
        assert_relative_eq!(norms[0], 0.0, epsilon = 1e-15);
        for k in 1..4 {
            assert_relative_eq!(norms[k], 1.0 / h, epsilon = 1e-14);
        }
    }

    #[test]
    fn grad_moment_rows_sum_to_zero() {
        // Column sums of B rows 2..4 vanish because sum_f |f| n_f = 0.
        for mesh in [generate_hex_mesh(1), generate_tet_mesh(1)] {
            let (topo, table) = setup(&mesh);
            for e in 0..mesh.n_elements() {
                let em = element_projection(&mesh, &topo, &table, e).unwrap();
                for row in 1..4 {
                    let sum: f64 = em.grad_moments.row(row).iter().sum();
                    assert!(sum.abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn cube_projection_reproduces_linears() {
        let mesh = generate_hex_mesh(1);
        let (topo, table) = setup(&mesh);
        let em = element_projection(&mesh, &topo, &table, 0).unwrap();
        let pd = &em.proj_coeffs * &em.transition;
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((pd[(i, j)] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tet_projection_is_exact_interpolation() {
        let mesh = kuhn_tet();
        let (topo, table) = setup(&mesh);
        let em = element_projection(&mesh, &topo, &table, 0).unwrap();
        // Four DOFs and four monomials: the projection coefficients are the
        // inverse Vandermonde of the monomial basis.
        let inv = em
            .transition
            .clone()
            .try_inverse()
            .expect("tet transition is invertible");
        for i in 0..4 {
            for j in 0..4 {
                assert!((em.proj_coeffs[(i, j)] - inv[(i, j)]).abs() < 1e-12);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((em.proj_dofs[(i, j)] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn consistency_relation_holds() {
        for mesh in [generate_hex_mesh(2), generate_tet_mesh(1)] {
            let (topo, table) = setup(&mesh);
            for e in 0..mesh.n_elements() {
                let em = element_projection(&mesh, &topo, &table, e).unwrap();
                let bd = &em.grad_moments * &em.transition;
                let scale = em.gram.norm();
                for i in 0..4 {
                    for j in 0..4 {
                        assert!((bd[(i, j)] - em.gram[(i, j)]).abs() <= 1e-12 * scale.max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn stiffness_kernel_contains_constants() {
        let mesh = generate_hex_mesh(1);
        let (topo, table) = setup(&mesh);
        let em = element_projection(&mesh, &topo, &table, 0).unwrap();
        let ak = local_stiffness(&em);
        let ones = DVector::from_element(8, 1.0);
        let norm = ak.norm();
        assert!((&ak * ones).norm() <= 1e-12 * norm);
        assert!((&ak - ak.transpose()).norm() <= 1e-12 * norm);
    }

    #[test]
    fn tet_stiffness_matches_fem_oracle() {
        let mesh = kuhn_tet();
        let (topo, table) = setup(&mesh);
        let em = element_projection(&mesh, &topo, &table, 0).unwrap();
        let ak = local_stiffness(&em);

        // Linear FEM stiffness: K_ij = |K| grad l_i . grad l_j with the hat
        // gradients from the inverse of the (1, x, y, z) Vandermonde matrix.
        let mut vander = DMatrix::zeros(4, 4);
        for (i, &v) in em.dofs.iter().enumerate() {
            let p = mesh.nodes[v];
            vander[(i, 0)] = 1.0;
            vander[(i, 1)] = p.x;
            vander[(i, 2)] = p.y;
            vander[(i, 3)] = p.z;
        }
        let inv = vander.try_inverse().unwrap();
        let vol = em.geometry.volume;
        for i in 0..4 {
            for j in 0..4 {
                let gi = Vector3::new(inv[(1, i)], inv[(2, i)], inv[(3, i)]);
                let gj = Vector3::new(inv[(1, j)], inv[(2, j)], inv[(3, j)]);
                let fem = vol * gi.dot(&gj);
                // On a tet the projection is exact, so the stabilization term
                // vanishes and the VEM matrix equals the FEM matrix.
                assert!((ak[(i, j)] - fem).abs() < 1e-12, "entry ({i},{j})");
            }
        }

        // Energy of a linear field v = x.
        let v = DVector::from_iterator(4, em.dofs.iter().map(|&k| mesh.nodes[k].x));
        let energy = (&ak * &v).dot(&v);
        assert_relative_eq!(energy, vol, epsilon = 1e-12);
    }

    #[test]
    fn cube_energy_of_linear_field() {
        let mesh = generate_hex_mesh(1);
        let (topo, table) = setup(&mesh);
        let em = element_projection(&mesh, &topo, &table, 0).unwrap();
        let ak = local_stiffness(&em);
        let v = DVector::from_iterator(8, em.dofs.iter().map(|&k| mesh.nodes[k].x));
        let energy = (&ak * &v).dot(&v);
        assert_relative_eq!(energy, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn load_examples() {
        let mesh = generate_hex_mesh(1);
        let (topo, table) = setup(&mesh);
        let em = element_projection(&mesh, &topo, &table, 0).unwrap();

        let zero = zero_pde();
        let f0 = local_load(&mesh, 0, &em, &zero, RhsScheme::Quad3).unwrap();
        assert!(f0.norm() == 0.0);

        let one = PdeData {
            load: Box::new(|_, _, _| 1.0),
            ..zero_pde()
        };
        for scheme in [RhsScheme::OnePoint, RhsScheme::Quad3] {
            let f1 = local_load(&mesh, 0, &em, &one, scheme).unwrap();
            assert_relative_eq!(f1.sum(), 1.0, epsilon = 1e-13);
        }

        // r = x against the analytic moments int_K x m dx on the unit cube.
        let rx = PdeData {
            load: Box::new(|x, _, _| x),
            ..zero_pde()
        };
        let f = local_load(&mesh, 0, &em, &rx, RhsScheme::Quad3).unwrap();
        let h = 3.0_f64.sqrt();
        let moments = DVector::from_vec(vec![0.5, 1.0 / (12.0 * h), 0.0, 0.0]);
        let expected = em.proj_coeffs.transpose() * moments;
        assert!((f - expected).norm() < 1e-13);
    }

    #[test]
    fn single_cube_system_has_rank_seven() {
        let mesh = generate_hex_mesh(1);
        let (topo, table) = setup(&mesh);
        let system = assemble(&mesh, &topo, &table, &zero_pde(), RhsScheme::Quad3).unwrap();
        assert_eq!(system.matrix.n, 8);
        let dense = system.matrix.to_dense();
        assert!((&dense - dense.transpose()).norm() < 1e-13);
        let eigen = dense.symmetric_eigen();
        let near_zero = eigen.eigenvalues.iter().filter(|l| l.abs() < 1e-10).count();
        let positive = eigen.eigenvalues.iter().filter(|&&l| l > 1e-10).count();
        assert_eq!(near_zero, 1, "kernel is spanned by constants");
        assert_eq!(positive, 7);
    }

    #[test]
    fn matrix_rows_only_couple_element_neighbours() {
        let mesh = generate_hex_mesh(2);
        let (topo, table) = setup(&mesh);
        let system = assemble(&mesh, &topo, &table, &zero_pde(), RhsScheme::Quad3).unwrap();
        for node in 0..mesh.n_nodes() {
            let mut neighbours = std::collections::HashSet::new();
            for e in 0..mesh.n_elements() {
                let verts = mesh.element_vertices(e);
                if verts.contains(&node) {
                    neighbours.extend(verts);
                }
            }
            let (cols, _) = system.matrix.row(node);
            for c in cols {
                assert!(neighbours.contains(c), "row {node} couples to {c}");
            }
        }
    }

    #[test]
    fn assembly_is_deterministic() {
        let mesh = generate_hex_mesh(2);
        let (topo, table) = setup(&mesh);
        let a = assemble(&mesh, &topo, &table, &zero_pde(), RhsScheme::Quad3).unwrap();
        let b = assemble(&mesh, &topo, &table, &zero_pde(), RhsScheme::Quad3).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.rhs, b.rhs);
    }

    #[test]
    fn global_matrix_annihilates_constants() {
        for mesh in [generate_hex_mesh(2), generate_tet_mesh(2)] {
            let (topo, table) = setup(&mesh);
            let system = assemble(&mesh, &topo, &table, &zero_pde(), RhsScheme::Quad3).unwrap();
            let ones = vec![1.0; mesh.n_nodes()];
            let product = system.matrix.mul_vec(&ones);
            let scale: f64 = system.matrix.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(product.iter().all(|v| v.abs() <= 1e-11 * scale.max(1.0)));
        }
    }

    #[test]
    fn global_energy_of_linear_field() {
        // v = x + 2y + 3z has energy int |grad v|^2 = 14 on the unit cube.
        for mesh in [generate_hex_mesh(2), generate_tet_mesh(1)] {
            let (topo, table) = setup(&mesh);
            let system = assemble(&mesh, &topo, &table, &zero_pde(), RhsScheme::Quad3).unwrap();
            let v: Vec<f64> = mesh.nodes.iter().map(|p| p.x + 2.0 * p.y + 3.0 * p.z).collect();
            let av = system.matrix.mul_vec(&v);
            let energy: f64 = av.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert_relative_eq!(energy, 14.0, epsilon = 1e-10);
        }
    }
}
