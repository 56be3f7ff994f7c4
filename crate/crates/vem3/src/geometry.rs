//! Per-element geometric quantities (centroid, volume, diameter) and per-face
//! outward normal and area.

use nalgebra::Vector3;

use crate::error::{Result, VemError};
use crate::local_frame;
use crate::mesh::PolyhedralMesh;

/// Centroid, volume and diameter of a polyhedral element.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub centroid: Vector3<f64>,
    pub volume: f64,
    pub diameter: f64,
}

/// Signed volume of the tetrahedron (a, b, c, d).
pub fn signed_tet_volume(
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    c: &Vector3<f64>,
    d: &Vector3<f64>,
) -> f64 {
    (b - a).cross(&(c - a)).dot(&(d - a)) / 6.0
}

/// Decompose an element into tetrahedra: apex at the mean of its distinct
/// vertices, each face fanned from its own vertex mean. The face triangles are
/// taken with outward orientation so the tetrahedra are positively oriented
/// for a correctly oriented, star-shaped element.
///
/// The callback receives the four tetrahedron corners in positive order.
pub(crate) fn for_each_decomposition_tet<F: FnMut(&[Vector3<f64>; 4])>(
    mesh: &PolyhedralMesh,
    element: usize,
    mut visit: F,
) {
    let verts = mesh.element_vertices(element);
    let apex = verts
        .iter()
        .map(|&i| mesh.nodes[i])
        .sum::<Vector3<f64>>()
        / verts.len() as f64;
    for face in &mesh.elements[element] {
        let pts = mesh.face_points(face);
        let face_mean = pts.iter().sum::<Vector3<f64>>() / pts.len() as f64;
        for k in 0..pts.len() {
            let p = pts[k];
            let q = pts[(k + 1) % pts.len()];
            // (apex, face_mean, q, p): positive for outward face orientation.
            visit(&[apex, face_mean, q, p]);
        }
    }
}

/// Volume, centroid and diameter of one element via tetrahedral decomposition.
pub fn element_geometry(mesh: &PolyhedralMesh, element: usize) -> Result<ElementGeometry> {
    let verts = mesh.element_vertices(element);
    let mut diameter: f64 = 0.0;
    for i in 0..verts.len() {
        for j in (i + 1)..verts.len() {
            diameter = diameter.max((mesh.nodes[verts[i]] - mesh.nodes[verts[j]]).norm());
        }
    }
    let mut volume = 0.0;
    let mut moment = Vector3::zeros();
    for_each_decomposition_tet(mesh, element, |tet| {
        let v = signed_tet_volume(&tet[0], &tet[1], &tet[2], &tet[3]);
        volume += v;
        moment += v * (tet[0] + tet[1] + tet[2] + tet[3]) / 4.0;
    });
    if volume.abs() < 1e-14 * diameter.powi(3) {
        return Err(VemError::DegenerateElement {
            element,
            reason: format!("volume {volume:.3e} vanishes relative to diameter {diameter:.3e}"),
        });
    }
    Ok(ElementGeometry {
        centroid: moment / volume,
        volume,
        diameter,
    })
}

/// Unit normal of a planar polygon from its first and closing edges. With the
/// vertices counterclockwise viewed from the element interior this points
/// outward.
pub fn face_normal(points: &[Vector3<f64>]) -> Result<Vector3<f64>> {
    assert!(points.len() >= 3, "a face needs at least 3 vertices");
    let e1 = points[1] - points[0];
    let en = points[0] - points[points.len() - 1];
    let cross = e1.cross(&en);
    let norm = cross.norm();
    if norm < 1e-14 {
        return Err(VemError::DegenerateFace(
            "first and closing edges are collinear".to_string(),
        ));
    }
    Ok(cross / norm)
}

/// Polygon area via the 2-D shoelace formula in the face's local frame.
pub fn face_area(points: &[Vector3<f64>]) -> Result<f64> {
    Ok(local_frame::polygon_chart(points)?.area)
}

/// Diagnostic checks on a loaded mesh: faces whose vertices deviate from the
/// first-edge plane by more than 1e-8 h_f, and faces whose normal does not
/// point away from the element centroid. Geometry is reported, never
/// repaired; the latter check can flag legitimately nonconvex elements, which
/// is why these are warnings and not errors.
pub fn mesh_diagnostics(mesh: &PolyhedralMesh) -> Vec<String> {
    let mut warnings = Vec::new();
    for element in 0..mesh.n_elements() {
        let geometry = match element_geometry(mesh, element) {
            Ok(g) => g,
            Err(e) => {
                warnings.push(e.to_string());
                continue;
            }
        };
        for (f, face) in mesh.elements[element].iter().enumerate() {
            let points = mesh.face_points(face);
            let chart = match local_frame::polygon_chart(&points) {
                Ok(c) => c,
                Err(e) => {
                    warnings.push(format!("element {element}, face {f}: {e}"));
                    continue;
                }
            };
            let normal = chart.normal();
            let deviation = points
                .iter()
                .map(|p| (p - points[0]).dot(&normal).abs())
                .fold(0.0, f64::max);
            if deviation > 1e-8 * chart.diameter {
                warnings.push(format!(
                    "element {element}, face {f}: vertices deviate from the face plane by {deviation:.3e}"
                ));
            }
            let mean = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
            if normal.dot(&(mean - geometry.centroid)) <= 0.0 {
                warnings.push(format!(
                    "element {element}, face {f}: normal does not point away from the element centroid"
                ));
            }
        }
    }
    warnings
}
