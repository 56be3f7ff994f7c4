//! Elliptic projection of the linear virtual element space on polygonal
//! faces.
//!
//! For a face with n vertices the projector onto the scaled monomials
//! m_1 = 1, m_2 = (s - s_f)/h_f, m_3 = (t - t_f)/h_f is represented by the
//! 3 x n coefficient matrix solving
//!
//!   G~ P = B~,   G~ = B~ D,
//!
//! where D evaluates the monomials at the vertices, rows 2..3 of B hold the
//! exact boundary integrals int_f grad m . grad phi_i (constant gradients
//! dotted with averaged outward edge normals) and the first row of B~ is the
//! vertex-average constraint fixing the projection on constants.

use nalgebra::{DMatrix, Matrix3, RowDVector, Vector3};

use crate::error::{Result, VemError};
use crate::local_frame::{polygon_chart, PolygonChart};
use crate::mesh::{MeshTopology, PolyhedralMesh};

/// The projection matrices of one face chart. `grad_moments` (B) keeps the
/// raw boundary-integral rows for consistency checks; the `constrained`
/// variants carry the vertex-average row.
#[derive(Debug, Clone)]
pub struct FaceSystem {
    /// D: n x 3 monomial values at the vertices.
    pub transition: DMatrix<f64>,
    /// B: 3 x n with rows int_f grad m_a . grad phi_i (first row zero).
    pub grad_moments: DMatrix<f64>,
    /// B~: B with the first row replaced by 1/n.
    pub grad_moments_constrained: DMatrix<f64>,
    /// G = B D.
    pub gram: Matrix3<f64>,
    /// G~ = B~ D.
    pub gram_constrained: Matrix3<f64>,
    /// Projection coefficients: 3 x n solution of G~ P = B~.
    pub coeffs: DMatrix<f64>,
}

/// Assemble the face projection system in the given chart.
pub fn face_system(chart: &PolygonChart) -> Result<FaceSystem> {
    let n = chart.vertices.len();
    let h = chart.diameter;
    let c = chart.centroid;

    let mut transition = DMatrix::zeros(n, 3);
    for (i, v) in chart.vertices.iter().enumerate() {
        transition[(i, 0)] = 1.0;
        transition[(i, 1)] = (v.x - c.x) / h;
        transition[(i, 2)] = (v.y - c.y) / h;
    }

    // For each vertex the k = 1 boundary formula reduces to the chord between
    // its neighbours rotated into the outward direction.
    let mut grad_moments = DMatrix::zeros(3, n);
    for i in 0..n {
        let prev = chart.vertices[(i + n - 1) % n];
        let next = chart.vertices[(i + 1) % n];
        let chord = next - prev;
        grad_moments[(1, i)] = chart.orientation * chord.y / (2.0 * h);
        grad_moments[(2, i)] = -chart.orientation * chord.x / (2.0 * h);
    }

    let mut grad_moments_constrained = grad_moments.clone();
    for i in 0..n {
        grad_moments_constrained[(0, i)] = 1.0 / n as f64;
    }

    let gram = Matrix3::from_iterator((&grad_moments * &transition).iter().copied());
    let gram_constrained =
        Matrix3::from_iterator((&grad_moments_constrained * &transition).iter().copied());

    let coeffs = gram_constrained
        .lu()
        .solve(&grad_moments_constrained)
        .ok_or_else(|| VemError::DegenerateFace("singular face projection system".to_string()))?;

    Ok(FaceSystem {
        transition,
        grad_moments,
        grad_moments_constrained,
        gram,
        gram_constrained,
        coeffs,
    })
}

/// Elliptic projection matrix of one face in face-vertex column order,
/// together with the chart it was computed in.
pub fn face_elliptic_projection(points: &[Vector3<f64>]) -> Result<(DMatrix<f64>, PolygonChart)> {
    let chart = polygon_chart(points)?;
    let system = face_system(&chart)?;
    Ok((system.coeffs, chart))
}

/// Projection data of one unique face, stored with columns sorted by
/// ascending global vertex index so elements on either side can look up the
/// matching column through their own sorted vertex lists.
#[derive(Debug, Clone)]
pub struct FaceProjection {
    /// 3 x n projection coefficients, column j belongs to `vertices[j]`.
    pub coeffs: DMatrix<f64>,
    /// Ascending global vertex indices of the face.
    pub vertices: Vec<usize>,
    /// Face area.
    pub area: f64,
    /// Chart of the stored face vertex order; `coeffs` is expressed in its
    /// monomials.
    pub chart: PolygonChart,
}

/// Compute the projection of every unique face once.
pub fn build_face_projection_table(
    mesh: &PolyhedralMesh,
    topology: &MeshTopology,
) -> Result<Vec<FaceProjection>> {
    let mut table = Vec::with_capacity(topology.n_faces());
    for face in &topology.faces {
        let points = mesh.face_points(face);
        let (raw, chart) = face_elliptic_projection(&points)?;

        let mut order: Vec<usize> = (0..face.len()).collect();
        order.sort_by_key(|&i| face[i]);
        let mut coeffs = DMatrix::zeros(3, face.len());
        let mut vertices = Vec::with_capacity(face.len());
        for (col, &src) in order.iter().enumerate() {
            coeffs.set_column(col, &raw.column(src));
            vertices.push(face[src]);
        }
        table.push(FaceProjection {
            coeffs,
            vertices,
            area: chart.area,
            chart,
        });
    }
    Ok(table)
}

/// Integral of the projected basis functions over the face:
/// int_f P phi_i = |f| * (first coefficient row), one entry per stored column.
pub fn face_integral_of_projection(fp: &FaceProjection) -> RowDVector<f64> {
    RowDVector::from_iterator(
        fp.coeffs.ncols(),
        fp.coeffs.row(0).iter().map(|v| v * fp.area),
    )
}

/// Scaled monomial values of a chart at a chart point.
pub fn face_monomials(chart: &PolygonChart, s: f64, t: f64) -> [f64; 3] {
    [
        1.0,
        (s - chart.centroid.x) / chart.diameter,
        (t - chart.centroid.y) / chart.diameter,
    ]
}
