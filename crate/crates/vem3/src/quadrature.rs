//! Numerical integration on polygons and polyhedra.
//!
//! Polygons are fan-triangulated from their area centroid, polyhedra are
//! tetrahedralized with the same decomposition the geometry module uses (apex
//! at the element's vertex mean, faces fanned from their vertex means). On the
//! resulting simplices we apply published symmetric Gauss rules with positive
//! weights.

use nalgebra::{DVector, Vector2, Vector3};

use crate::error::{Result, VemError};
use crate::geometry::{for_each_decomposition_tet, signed_tet_volume};
use crate::local_frame::{polygon_centroid, signed_area};
use crate::mesh::PolyhedralMesh;

/// Symmetric quadrature rule on the reference simplex with M barycentric
/// coordinates (M = 3 triangle, M = 4 tetrahedron). Weights are positive and
/// sum to the reference measure (1/2 resp. 1/6).
#[derive(Debug, Clone)]
pub struct QuadratureRule<const M: usize> {
    pub points: Vec<[f64; M]>,
    pub weights: Vec<f64>,
    /// Maximal total polynomial degree integrated exactly.
    pub degree: usize,
}

impl<const M: usize> QuadratureRule<M> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn tri_orbit_center() -> (Vec<[f64; 3]>, Vec<f64>) {
    (vec![[1.0 / 3.0; 3]], vec![0.5])
}

/// Triangle orbit (1-2a, a, a) and its cyclic images, normalized weight w.
fn tri_orbit_s21(a: f64, w: f64) -> (Vec<[f64; 3]>, Vec<f64>) {
    let b = 1.0 - 2.0 * a;
    (
        vec![[b, a, a], [a, b, a], [a, a, b]],
        vec![0.5 * w, 0.5 * w, 0.5 * w],
    )
}

/// Triangle rule exact at least to `degree` (1..=4), positive weights.
pub fn triangle_rule(degree: usize) -> Result<QuadratureRule<3>> {
    match degree {
        1 => {
            let (points, weights) = tri_orbit_center();
            Ok(QuadratureRule { points, weights, degree: 1 })
        }
        2 => {
            let (points, weights) = tri_orbit_s21(1.0 / 6.0, 1.0 / 3.0);
            Ok(QuadratureRule { points, weights, degree: 2 })
        }
        3 | 4 => {
            // Six-point degree-4 rule (Strang-Fix / Dunavant).
            let (mut points, mut weights) =
                tri_orbit_s21(0.445_948_490_915_965, 0.223_381_589_678_011);
            let (p2, w2) = tri_orbit_s21(0.091_576_213_509_771, 0.109_951_743_655_322);
            points.extend(p2);
            weights.extend(w2);
            Ok(QuadratureRule { points, weights, degree: 4 })
        }
        _ => Err(VemError::UnsupportedDegree(degree)),
    }
}

/// Tetrahedron orbit (1-3b, b, b, b) over the four coordinate positions,
/// normalized weight w.
fn tet_orbit_s31(b: f64, w: f64) -> (Vec<[f64; 4]>, Vec<f64>) {
    let a = 1.0 - 3.0 * b;
    let mut points = Vec::with_capacity(4);
    for pos in 0..4 {
        let mut p = [b; 4];
        p[pos] = a;
        points.push(p);
    }
    (points, vec![w / 6.0; 4])
}

/// Tetrahedron orbit (a, a, b, b) over the six position pairs, b = 1/2 - a.
fn tet_orbit_s22(a: f64, w: f64) -> (Vec<[f64; 4]>, Vec<f64>) {
    let b = 0.5 - a;
    let mut points = Vec::with_capacity(6);
    for i in 0..4 {
        for j in (i + 1)..4 {
            let mut p = [b; 4];
            p[i] = a;
            p[j] = a;
            points.push(p);
        }
    }
    (points, vec![w / 6.0; 6])
}

/// Tetrahedron rule exact at least to `degree` (1..=4), positive weights.
///
/// Degrees 3 and 4 are served by the 14-point degree-5 Keast rule: the
/// classical 5-point degree-3 rule carries a negative center weight, which we
/// avoid.
pub fn tetrahedron_rule(degree: usize) -> Result<QuadratureRule<4>> {
    match degree {
        1 => Ok(QuadratureRule {
            points: vec![[0.25; 4]],
            weights: vec![1.0 / 6.0],
            degree: 1,
        }),
        2 => {
            let (points, weights) = tet_orbit_s31(0.138_196_601_125_010_5, 0.25);
            Ok(QuadratureRule { points, weights, degree: 2 })
        }
        3 | 4 => {
            let (mut points, mut weights) =
                tet_orbit_s31(0.310_885_919_263_300_5, 0.112_687_925_718_016_2);
            let (p2, w2) = tet_orbit_s31(0.092_735_250_310_891_2, 0.073_493_043_116_361_9);
            let (p3, w3) = tet_orbit_s22(0.454_496_295_874_350_6, 0.042_546_020_777_081_2);
            points.extend(p2);
            points.extend(p3);
            weights.extend(w2);
            weights.extend(w3);
            Ok(QuadratureRule { points, weights, degree: 5 })
        }
        _ => Err(VemError::UnsupportedDegree(degree)),
    }
}

/// Integrate a vector-valued function over a 2-D polygon given by its chart
/// vertices. The polygon is fan-triangulated from its area centroid; it must
/// be star-shaped with respect to that point.
pub fn integral_polygon<F>(
    fun: F,
    degree: usize,
    vertices: &[Vector2<f64>],
) -> Result<DVector<f64>>
where
    F: Fn(f64, f64) -> DVector<f64>,
{
    let rule = triangle_rule(degree)?;
    let center = polygon_centroid(vertices);
    let orientation = signed_area(vertices).signum();
    let n = vertices.len();
    let mut result: Option<DVector<f64>> = None;
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        let twice_signed = (p.x - center.x) * (q.y - center.y) - (q.x - center.x) * (p.y - center.y);
        // Every fan triangle must agree with the polygon orientation.
        if orientation * twice_signed <= 0.0 {
            return Err(VemError::NotStarShapedPolygon);
        }
        let jac = twice_signed.abs(); // |det J| of the barycentric map
        for (point, w) in rule.points.iter().zip(&rule.weights) {
            let s = point[0] * center.x + point[1] * p.x + point[2] * q.x;
            let t = point[0] * center.y + point[1] * p.y + point[2] * q.y;
            let value = fun(s, t) * (w * jac);
            match &mut result {
                Some(acc) => *acc += value,
                None => result = Some(value),
            }
        }
    }
    Ok(result.expect("polygon has at least three vertices"))
}

/// Integrate a vector-valued function over one polyhedral element via the
/// shared tetrahedral decomposition. The element must be star-shaped with
/// respect to its vertex mean.
pub fn integral_polyhedron<F>(
    fun: F,
    degree: usize,
    mesh: &PolyhedralMesh,
    element: usize,
) -> Result<DVector<f64>>
where
    F: Fn(f64, f64, f64) -> DVector<f64>,
{
    let rule = tetrahedron_rule(degree)?;
    let mut result: Option<DVector<f64>> = None;
    let mut bad = false;
    for_each_decomposition_tet(mesh, element, |tet| {
        let vol = signed_tet_volume(&tet[0], &tet[1], &tet[2], &tet[3]);
        if vol <= 0.0 {
            bad = true;
            return;
        }
        let jac = 6.0 * vol;
        for (point, w) in rule.points.iter().zip(&rule.weights) {
            let mut x = Vector3::zeros();
            for (lambda, corner) in point.iter().zip(tet.iter()) {
                x += *lambda * corner;
            }
            let value = fun(x.x, x.y, x.z) * (w * jac);
            match &mut result {
                Some(acc) => *acc += value,
                None => result = Some(value),
            }
        }
    });
    if bad {
        return Err(VemError::NotStarShapedElement { element });
    }
    Ok(result.expect("element has at least one face"))
}
