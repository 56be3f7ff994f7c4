//! Local 2-D coordinate chart (s, t) on a polygonal face embedded in 3-D.
//!
//! The chart origin is the first face vertex, the t axis is the unit vector
//! along the first edge and the s axis completes the in-plane pair. Because
//! the axes are orthonormal, the chart is the isometry (s, t) =
//! ((a - a1).s_axis, (a - a1).t_axis) with inverse a1 + s*s_axis + t*t_axis.

use nalgebra::{Vector2, Vector3};

use crate::error::{Result, VemError};
use crate::geometry;

/// Orthonormal in-plane frame of a face.
#[derive(Debug, Clone, Copy)]
pub struct LocalFrame {
    pub origin: Vector3<f64>,
    /// In-plane unit vector carrying the s coordinate (t_axis x normal).
    pub s_axis: Vector3<f64>,
    /// In-plane unit vector along the first edge, carrying the t coordinate.
    pub t_axis: Vector3<f64>,
    /// Unit face normal, outward under the counterclockwise-from-inside
    /// vertex convention.
    pub normal: Vector3<f64>,
}

impl LocalFrame {
    pub fn chart(&self, p: &Vector3<f64>) -> Vector2<f64> {
        let d = p - self.origin;
        Vector2::new(d.dot(&self.s_axis), d.dot(&self.t_axis))
    }

    pub fn to_3d(&self, s: f64, t: f64) -> Vector3<f64> {
        self.origin + s * self.s_axis + t * self.t_axis
    }
}

/// Build the local frame of a face from its ordered vertex coordinates.
pub fn build_frame(points: &[Vector3<f64>]) -> Result<LocalFrame> {
    let e1 = points[1] - points[0];
    let len = e1.norm();
    if len < 1e-14 {
        return Err(VemError::DegenerateFace("first edge has zero length".to_string()));
    }
    let t_axis = e1 / len;
    let normal = geometry::face_normal(points)?;
    let s_axis = t_axis.cross(&normal);
    Ok(LocalFrame {
        origin: points[0],
        s_axis,
        t_axis,
        normal,
    })
}

/// A face transformed into its local chart, with the 2-D quantities needed by
/// the face projection and quadrature.
#[derive(Debug, Clone)]
pub struct PolygonChart {
    pub frame: LocalFrame,
    /// (s, t) coordinates of the face vertices.
    pub vertices: Vec<Vector2<f64>>,
    /// Unsigned polygon area.
    pub area: f64,
    /// +1 if the chart polygon is counterclockwise in (s, t), -1 otherwise.
    pub orientation: f64,
    /// Area centroid (s_f, t_f).
    pub centroid: Vector2<f64>,
    /// Diameter h_f (max pairwise vertex distance).
    pub diameter: f64,
}

impl PolygonChart {
    pub fn normal(&self) -> Vector3<f64> {
        self.frame.normal
    }

    pub fn to_3d(&self, s: f64, t: f64) -> Vector3<f64> {
        self.frame.to_3d(s, t)
    }
}

/// Signed shoelace area of a 2-D polygon.
pub(crate) fn signed_area(vertices: &[Vector2<f64>]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    0.5 * twice
}

/// Area centroid of a 2-D polygon (shoelace centroid; orientation cancels).
pub(crate) fn polygon_centroid(vertices: &[Vector2<f64>]) -> Vector2<f64> {
    let n = vertices.len();
    let a = signed_area(vertices);
    let mut c = Vector2::zeros();
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        let w = p.x * q.y - q.x * p.y;
        c += w * (p + q);
    }
    c / (6.0 * a)
}

/// Transform a face into its local chart and compute area, centroid and
/// diameter.
pub fn polygon_chart(points: &[Vector3<f64>]) -> Result<PolygonChart> {
    let frame = build_frame(points)?;
    let vertices: Vec<Vector2<f64>> = points.iter().map(|p| frame.chart(p)).collect();
    let mut diameter: f64 = 0.0;
    for i in 0..vertices.len() {
        for j in (i + 1)..vertices.len() {
            diameter = diameter.max((vertices[i] - vertices[j]).norm());
        }
    }
    let signed = signed_area(&vertices);
    if signed.abs() < 1e-14 * diameter * diameter {
        return Err(VemError::DegenerateFace("polygon area vanishes".to_string()));
    }
    let centroid = polygon_centroid(&vertices);
    Ok(PolygonChart {
        frame,
        vertices,
        area: signed.abs(),
        orientation: signed.signum(),
        centroid,
        diameter,
    })
}
