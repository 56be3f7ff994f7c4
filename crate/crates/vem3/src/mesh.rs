//! Polyhedral mesh data model, JSON ingestion, structured generators and
//! topological auxiliary structures (unique face set, element-to-face map,
//! boundary identification).
//!
//! A mesh is a list of node coordinates plus, per element, an ordered list of
//! faces, each face an ordered list of node indices. Face vertices are listed
//! counterclockwise when viewed from the element interior, so the cross
//! product of the first and closing edges points outward.

use std::collections::HashMap;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VemError};

/// Coordinate tolerance for boundary plane predicates. Unit-cube coordinates
/// from the built-in generators are exact; the tolerance guards file
/// round-trips.
pub const PREDICATE_TOL: f64 = 1e-10;

/// General polyhedral mesh: node coordinates plus per-element face lists.
#[derive(Debug, Clone)]
pub struct PolyhedralMesh {
    pub nodes: Vec<Vector3<f64>>,
    /// elements[e][f] is the ordered vertex list of face f of element e,
    /// counterclockwise viewed from inside the element.
    pub elements: Vec<Vec<Vec<usize>>>,
}

impl PolyhedralMesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// Ascending list of the distinct vertex indices of one element.
    pub fn element_vertices(&self, element: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.elements[element]
            .iter()
            .flat_map(|f| f.iter().copied())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn face_points(&self, face: &[usize]) -> Vec<Vector3<f64>> {
        face.iter().map(|&i| self.nodes[i]).collect()
    }

    /// Check the structural invariants: index bounds, at least 3 distinct
    /// vertices per face, and a closed surface per element (every edge shared
    /// by exactly two of its faces).
    pub fn validate(&self) -> Result<()> {
        let n = self.n_nodes();
        for (e, faces) in self.elements.iter().enumerate() {
            let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
            for (f, face) in faces.iter().enumerate() {
                let mut distinct = face.clone();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() < 3 || distinct.len() != face.len() {
                    return Err(VemError::FaceTooSmall { element: e, face: f });
                }
                for &i in face {
                    if i >= n {
                        return Err(VemError::IndexOutOfRange {
                            element: e,
                            face: f,
                            index: i,
                            n_nodes: n,
                        });
                    }
                }
                for k in 0..face.len() {
                    let a = face[k];
                    let b = face[(k + 1) % face.len()];
                    let key = (a.min(b), a.max(b));
                    *edge_count.entry(key).or_insert(0) += 1;
                }
            }
            for (&(a, b), &count) in &edge_count {
                if count != 2 {
                    return Err(VemError::OpenSurface {
                        element: e,
                        a,
                        b,
                        count,
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MeshFile {
    nodes: Vec<[f64; 3]>,
    elements: Vec<Vec<Vec<usize>>>,
}

/// Load a mesh from the JSON format `{"nodes": [[x,y,z],...], "elements":
/// [[[i,j,k,...],...],...]}` with 0-based node indices.
pub fn load_mesh<P: AsRef<Path>>(path: P) -> Result<PolyhedralMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| VemError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: MeshFile = serde_json::from_str(&text).map_err(|source| VemError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    let mesh = PolyhedralMesh {
        nodes: file.nodes.iter().map(|p| Vector3::new(p[0], p[1], p[2])).collect(),
        elements: file.elements,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Write a mesh in the JSON format accepted by [`load_mesh`]. Coordinates
/// round-trip exactly.
pub fn save_mesh<P: AsRef<Path>>(mesh: &PolyhedralMesh, path: P) -> Result<()> {
    let path = path.as_ref();
    let file = MeshFile {
        nodes: mesh.nodes.iter().map(|p| [p.x, p.y, p.z]).collect(),
        elements: mesh.elements.clone(),
    };
    let text = serde_json::to_string_pretty(&file).expect("mesh serialization cannot fail");
    std::fs::write(path, text).map_err(|source| VemError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Faces of an axis-aligned hexahedral cell, counterclockwise from inside.
/// `corners` holds the node indices in (x, y, z)-bit order:
/// [v000, v100, v010, v110, v001, v101, v011, v111].
pub(crate) fn hex_cell_faces(c: &[usize; 8]) -> Vec<Vec<usize>> {
    vec![
        vec![c[0], c[1], c[3], c[2]], // z = 0, outward -z
        vec![c[4], c[6], c[7], c[5]], // z = 1, outward +z
        vec![c[0], c[2], c[6], c[4]], // x = 0, outward -x
        vec![c[1], c[5], c[7], c[3]], // x = 1, outward +x
        vec![c[0], c[4], c[5], c[1]], // y = 0, outward -y
        vec![c[2], c[3], c[7], c[6]], // y = 1, outward +y
    ]
}

/// Uniform n x n x n hexahedral partition of the unit cube, mesh size 1/n.
pub fn generate_hex_mesh(n: usize) -> PolyhedralMesh {
    assert!(n >= 1, "need at least one subdivision per axis");
    let np = n + 1;
    let idx = |i: usize, j: usize, k: usize| k * np * np + j * np + i;
    let mut nodes = Vec::with_capacity(np * np * np);
    for k in 0..np {
        for j in 0..np {
            for i in 0..np {
                nodes.push(Vector3::new(
                    i as f64 / n as f64,
                    j as f64 / n as f64,
                    k as f64 / n as f64,
                ));
            }
        }
    }
    let mut elements = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let corners = [
                    idx(i, j, k),
                    idx(i + 1, j, k),
                    idx(i, j + 1, k),
                    idx(i + 1, j + 1, k),
                    idx(i, j, k + 1),
                    idx(i + 1, j, k + 1),
                    idx(i, j + 1, k + 1),
                    idx(i + 1, j + 1, k + 1),
                ];
                elements.push(hex_cell_faces(&corners));
            }
        }
    }
    PolyhedralMesh { nodes, elements }
}

/// Faces of a positively oriented tetrahedron (a, b, c, d), counterclockwise
/// from inside.
fn tet_faces(a: usize, b: usize, c: usize, d: usize) -> Vec<Vec<usize>> {
    vec![vec![a, b, c], vec![a, d, b], vec![a, c, d], vec![b, d, c]]
}

/// Tetrahedral mesh of the unit cube: the hex mesh with every cell split into
/// the six path tetrahedra sharing the main diagonal (Kuhn split). Each
/// tetrahedron is stored as a four-face polyhedral element.
pub fn generate_tet_mesh(n: usize) -> PolyhedralMesh {
    let hex = generate_hex_mesh(n);
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let parity = |p: &[usize; 3]| -> bool {
        // true when even
        let mut inv = 0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        inv % 2 == 0
    };
    let mut elements = Vec::with_capacity(6 * hex.n_elements());
    for faces in &hex.elements {
        // Recover the corner array from the generator's face layout.
        let bottom = &faces[0];
        let top = &faces[1];
        let corners = [
            bottom[0], bottom[1], bottom[3], bottom[2], top[0], top[3], top[1], top[2],
        ];
        for perm in &PERMS {
            let mut bits = [0usize; 3]; // cumulative (bx, by, bz) along the path
            let mut path = [corners[0]; 4];
            for (step, &axis) in perm.iter().enumerate() {
                bits[axis] = 1;
                path[step + 1] = corners[bits[0] + 2 * bits[1] + 4 * bits[2]];
            }
            let (p0, p1, mut p2, mut p3) = (path[0], path[1], path[2], path[3]);
            if !parity(perm) {
                std::mem::swap(&mut p2, &mut p3);
            }
            elements.push(tet_faces(p0, p1, p2, p3));
        }
    }
    PolyhedralMesh {
        nodes: hex.nodes,
        elements,
    }
}

/// Deduplicated face set plus the element-to-face index map.
#[derive(Debug, Clone)]
pub struct MeshTopology {
    /// Unique faces; the stored vertex order comes from the first element that
    /// contributed the face.
    pub faces: Vec<Vec<usize>>,
    /// Canonical key (ascending vertex tuple) per unique face.
    pub keys: Vec<Vec<usize>>,
    /// elem2face[e][f] = global index of face f of element e.
    pub elem2face: Vec<Vec<usize>>,
    /// Number of (element, local face) pairs referencing each unique face:
    /// 1 on the boundary, 2 in the interior.
    pub ref_count: Vec<usize>,
}

impl MeshTopology {
    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    /// Indices of the faces referenced by exactly one element.
    pub fn boundary_faces(&self) -> Vec<usize> {
        (0..self.n_faces()).filter(|&f| self.ref_count[f] == 1).collect()
    }
}

/// Identify unique faces by their sorted vertex tuple and build the
/// element-to-face map.
pub fn build_topology(mesh: &PolyhedralMesh) -> Result<MeshTopology> {
    let mut lookup: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut faces = Vec::new();
    let mut keys = Vec::new();
    let mut ref_count = Vec::new();
    let mut elem2face = Vec::with_capacity(mesh.n_elements());
    for element in &mesh.elements {
        let mut local = Vec::with_capacity(element.len());
        for face in element {
            let mut key = face.clone();
            key.sort_unstable();
            let id = match lookup.get(&key) {
                Some(&id) => {
                    ref_count[id] += 1;
                    if ref_count[id] > 2 {
                        return Err(VemError::NonManifold { vertices: key });
                    }
                    id
                }
                None => {
                    let id = faces.len();
                    lookup.insert(key.clone(), id);
                    faces.push(face.clone());
                    keys.push(key);
                    ref_count.push(1);
                    id
                }
            };
            local.push(id);
        }
        elem2face.push(local);
    }
    Ok(MeshTopology {
        faces,
        keys,
        elem2face,
        ref_count,
    })
}

/// Boundary plane predicate: one of the six unit-cube planes, unions with
/// '|', or "none".
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryPredicate {
    None,
    Planes(Vec<(usize, f64)>),
}

impl BoundaryPredicate {
    /// Parse predicate strings such as `"x==0"`, `"x==0|y==1"` or `"none"`.
    pub fn parse(text: &str) -> Result<BoundaryPredicate> {
        let trimmed = text.trim();
        if trimmed.eq_ignore_ascii_case("none") || trimmed.is_empty() {
            return Ok(BoundaryPredicate::None);
        }
        let mut planes = Vec::new();
        for part in trimmed.split('|') {
            let p = part.trim();
            let (axis, value) = match p {
                "x==0" => (0, 0.0),
                "x==1" => (0, 1.0),
                "y==0" => (1, 0.0),
                "y==1" => (1, 1.0),
                "z==0" => (2, 0.0),
                "z==1" => (2, 1.0),
                _ => return Err(VemError::UnsupportedPredicate(text.to_string())),
            };
            planes.push((axis, value));
        }
        Ok(BoundaryPredicate::Planes(planes))
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        match self {
            BoundaryPredicate::None => false,
            BoundaryPredicate::Planes(planes) => planes
                .iter()
                .any(|&(axis, value)| (p[axis] - value).abs() <= PREDICATE_TOL),
        }
    }
}

/// Partition of the boundary faces into Neumann and Dirichlet parts, plus the
/// sorted set of Dirichlet nodes.
#[derive(Debug, Clone)]
pub struct BoundaryStruct {
    pub neumann_faces: Vec<Vec<usize>>,
    pub neumann_face_idx: Vec<usize>,
    pub dirichlet_faces: Vec<Vec<usize>>,
    pub dirichlet_face_idx: Vec<usize>,
    /// Ascending unique vertex indices of the Dirichlet faces.
    pub dirichlet_nodes: Vec<usize>,
}

/// Classify boundary faces: a face is Neumann iff all of its vertices satisfy
/// the predicate; every other boundary face is Dirichlet.
pub fn set_boundary(
    mesh: &PolyhedralMesh,
    topology: &MeshTopology,
    predicate: &BoundaryPredicate,
) -> BoundaryStruct {
    let mut bd = BoundaryStruct {
        neumann_faces: Vec::new(),
        neumann_face_idx: Vec::new(),
        dirichlet_faces: Vec::new(),
        dirichlet_face_idx: Vec::new(),
        dirichlet_nodes: Vec::new(),
    };
    for f in topology.boundary_faces() {
        let face = &topology.faces[f];
        let neumann = face.iter().all(|&i| predicate.contains(&mesh.nodes[i]));
        if neumann {
            bd.neumann_faces.push(face.clone());
            bd.neumann_face_idx.push(f);
        } else {
            bd.dirichlet_faces.push(face.clone());
            bd.dirichlet_face_idx.push(f);
            bd.dirichlet_nodes.extend(face.iter().copied());
        }
    }
    bd.dirichlet_nodes.sort_unstable();
    bd.dirichlet_nodes.dedup();
    bd
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    /// Two unit cubes sharing the x = 1 face: nodes on the grid
    /// {0,1,2} x {0,1} x {0,1}.
    pub(crate) fn two_cube_mesh() -> PolyhedralMesh {
        let idx = |i: usize, j: usize, k: usize| k * 6 + j * 3 + i;
        let mut nodes = Vec::new();
        for k in 0..2 {
            for j in 0..2 {
                for i in 0..3 {
                    nodes.push(Vector3::new(i as f64, j as f64, k as f64));
                }
            }
        }
        let cell = |i0: usize| {
            let corners = [
                idx(i0, 0, 0),
                idx(i0 + 1, 0, 0),
                idx(i0, 1, 0),
                idx(i0 + 1, 1, 0),
                idx(i0, 0, 1),
                idx(i0 + 1, 0, 1),
                idx(i0, 1, 1),
                idx(i0 + 1, 1, 1),
            ];
            hex_cell_faces(&corners)
        };
        PolyhedralMesh {
            nodes,
            elements: vec![cell(0), cell(1)],
        }
    }

    fn brute_force_face_count(mesh: &PolyhedralMesh) -> usize {
        let mut set = HashSet::new();
        for e in &mesh.elements {
            for f in e {
                let mut key = f.clone();
                key.sort_unstable();
                set.insert(key);
            }
        }
        set.len()
    }

    #[test]
    fn hex_mesh_counts() {
        let m1 = generate_hex_mesh(1);
        assert_eq!(m1.n_nodes(), 8);
        assert_eq!(m1.n_elements(), 1);
        m1.validate().unwrap();
        let t1 = build_topology(&m1).unwrap();
        assert_eq!(t1.n_faces(), 6);
        assert_eq!(t1.elem2face[0], vec![0, 1, 2, 3, 4, 5]);

        let m2 = generate_hex_mesh(2);
        assert_eq!(m2.n_nodes(), 27);
        assert_eq!(m2.n_elements(), 8);
        let t2 = build_topology(&m2).unwrap();
        assert_eq!(t2.n_faces(), 36);
        assert_eq!(t2.n_faces(), brute_force_face_count(&m2));

        let m4 = generate_hex_mesh(4);
        assert_eq!(m4.n_elements(), 64);
    }

    #[test]
    fn tet_mesh_counts_and_volume() {
        let m = generate_tet_mesh(1);
        assert_eq!(m.n_elements(), 6);
        m.validate().unwrap();
        // Each element is a tetrahedron; sum the signed volumes directly.
        let mut total = 0.0;
        for e in 0..m.n_elements() {
            let v = m.element_vertices(e);
            assert_eq!(v.len(), 4);
            let p: Vec<_> = v.iter().map(|&i| m.nodes[i]).collect();
            let vol = (p[1] - p[0]).cross(&(p[2] - p[0])).dot(&(p[3] - p[0])).abs() / 6.0;
            total += vol;
        }
        assert!((total - 1.0).abs() < 1e-12);

        assert_eq!(generate_tet_mesh(2).n_elements(), 48);
    }

    #[test]
    fn tet_mesh_elements_are_closed() {
        for n in 1..=3 {
            generate_tet_mesh(n).validate().unwrap();
        }
    }

    #[test]
    fn two_cubes_share_one_face() {
        let mesh = two_cube_mesh();
        mesh.validate().unwrap();
        let topo = build_topology(&mesh).unwrap();
        assert_eq!(topo.n_faces(), 11);
        assert_eq!(topo.ref_count.iter().filter(|&&c| c == 2).count(), 1);
        assert_eq!(topo.n_faces(), brute_force_face_count(&mesh));
    }

    #[test]
    fn non_manifold_is_rejected() {
        // Three tetrahedra stacked on the same triangle {0,1,2}.
        let nodes = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.3, 0.3, 1.0),
            Vector3::new(0.3, 0.3, 2.0),
            Vector3::new(0.3, 0.3, 3.0),
        ];
        let elements = vec![tet_faces(0, 1, 2, 3), tet_faces(0, 1, 2, 4), tet_faces(0, 1, 2, 5)];
        let mesh = PolyhedralMesh { nodes, elements };
        match build_topology(&mesh) {
            Err(VemError::NonManifold { vertices }) => assert_eq!(vertices, vec![0, 1, 2]),
            other => panic!("expected non-manifold error, got {other:?}"),
        }
    }

    #[test]
    fn load_cube_mesh_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cube.json");
        save_mesh(&generate_hex_mesh(1), &path).unwrap();
        let mesh = load_mesh(&path).unwrap();
        assert_eq!(mesh.n_nodes(), 8);
        assert_eq!(mesh.n_elements(), 1);
        mesh.validate().unwrap();
    }

    #[test]
    fn load_reports_out_of_range_index() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        let mut mesh = generate_hex_mesh(1);
        mesh.elements[0][0][1] = 8; // only 8 nodes, max valid index 7
        let file_ok = save_mesh(&mesh, &path);
        assert!(file_ok.is_ok());
        match load_mesh(&path) {
            Err(VemError::IndexOutOfRange { element, index, n_nodes, .. }) => {
                assert_eq!(element, 0);
                assert_eq!(index, 8);
                assert_eq!(n_nodes, 8);
            }
            other => panic!("expected index error, got {other:?}"),
        }
    }

    #[test]
    fn load_two_by_two_mesh_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hex2.json");
        save_mesh(&generate_hex_mesh(2), &path).unwrap();
        let mesh = load_mesh(&path).unwrap();
        assert_eq!(mesh.n_nodes(), 27);
        assert_eq!(mesh.n_elements(), 8);
    }

    #[test]
    fn tiny_and_duplicate_vertex_faces_are_rejected() {
        let mut mesh = generate_hex_mesh(1);
        mesh.elements[0][2] = vec![0, 1];
        assert!(matches!(
            mesh.validate(),
            Err(VemError::FaceTooSmall { element: 0, face: 2 })
        ));
        let mut mesh = generate_hex_mesh(1);
        mesh.elements[0][4] = vec![0, 1, 1, 2];
        assert!(matches!(
            mesh.validate(),
            Err(VemError::FaceTooSmall { element: 0, face: 4 })
        ));
    }

    #[test]
    fn open_surface_is_rejected() {
        let mut mesh = generate_hex_mesh(1);
        mesh.elements[0].pop();
        match mesh.validate() {
            Err(VemError::OpenSurface { element: 0, count: 1, .. }) => {}
            other => panic!("expected open-surface error, got {other:?}"),
        }
    }

    #[test]
    fn topology_is_idempotent() {
        let mesh = generate_hex_mesh(3);
        let a = build_topology(&mesh).unwrap();
        let b = build_topology(&mesh).unwrap();
        assert_eq!(a.faces, b.faces);
        assert_eq!(a.elem2face, b.elem2face);
    }

    #[test]
    fn reference_counts_are_consistent() {
        for mesh in [generate_hex_mesh(2), generate_tet_mesh(2), two_cube_mesh()] {
            let topo = build_topology(&mesh).unwrap();
            let total_refs: usize = topo.ref_count.iter().sum();
            let total_faces: usize = mesh.elements.iter().map(|e| e.len()).sum();
            assert_eq!(total_refs, total_faces);
        }
    }

    #[test]
    fn hex_boundary_face_count() {
        for n in [1usize, 2, 3, 4] {
            let topo = build_topology(&generate_hex_mesh(n)).unwrap();
            assert_eq!(topo.boundary_faces().len(), 6 * n * n);
        }
    }

    #[test]
    fn boundary_unit_cube_x0() {
        let mesh = generate_hex_mesh(1);
        let topo = build_topology(&mesh).unwrap();
        let pred = BoundaryPredicate::parse("x==0").unwrap();
        let bd = set_boundary(&mesh, &topo, &pred);
        assert_eq!(bd.neumann_faces.len(), 1);
        assert_eq!(bd.dirichlet_faces.len(), 5);
        // The x = 0 vertices also lie on Dirichlet faces, so every node is
        // constrained.
        assert_eq!(bd.dirichlet_nodes.len(), 8);
    }

    #[test]
    fn boundary_none_is_all_dirichlet() {
        let mesh = generate_hex_mesh(1);
        let topo = build_topology(&mesh).unwrap();
        let bd = set_boundary(&mesh, &topo, &BoundaryPredicate::parse("none").unwrap());
        assert!(bd.neumann_faces.is_empty());
        assert_eq!(bd.dirichlet_faces.len(), 6);
    }

    #[test]
    fn boundary_hex2_x0() {
        let mesh = generate_hex_mesh(2);
        let topo = build_topology(&mesh).unwrap();
        let pred = BoundaryPredicate::parse("x==0").unwrap();
        let bd = set_boundary(&mesh, &topo, &pred);
        assert_eq!(bd.neumann_faces.len(), 4);

        // Brute-force oracle over the 27-node grid: Dirichlet nodes are the
        // vertices of boundary faces that are not entirely on x = 0.
        let mut expected: HashSet<usize> = HashSet::new();
        for &f in &topo.boundary_faces() {
            let face = &topo.faces[f];
            if !face.iter().all(|&i| mesh.nodes[i].x.abs() <= PREDICATE_TOL) {
                expected.extend(face.iter().copied());
            }
        }
        assert_eq!(bd.dirichlet_nodes.len(), expected.len());
        assert_eq!(bd.dirichlet_nodes.len(), 25);
        assert!(bd.dirichlet_nodes.iter().all(|i| expected.contains(i)));
    }

    #[test]
    fn unsupported_predicate_is_rejected() {
        assert!(matches!(
            BoundaryPredicate::parse("x==0.5"),
            Err(VemError::UnsupportedPredicate(_))
        ));
        assert!(matches!(
            BoundaryPredicate::parse("w==0"),
            Err(VemError::UnsupportedPredicate(_))
        ));
        assert!(BoundaryPredicate::parse("x==0|y==1|z==0").is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn boundary_partition_is_complete(n in 1usize..4, which in 0usize..8) {
            let mesh = generate_hex_mesh(n);
            let topo = build_topology(&mesh).unwrap();
            let preds = ["none", "x==0", "x==1", "y==0", "y==1", "z==0", "z==1", "x==0|z==1"];
            let pred = BoundaryPredicate::parse(preds[which]).unwrap();
            let bd = set_boundary(&mesh, &topo, &pred);
            prop_assert_eq!(
                bd.neumann_faces.len() + bd.dirichlet_faces.len(),
                topo.boundary_faces().len()
            );
        }

        #[test]
        fn generated_meshes_are_valid(n in 1usize..4, tet in proptest::bool::ANY) {
            let mesh = if tet { generate_tet_mesh(n) } else { generate_hex_mesh(n) };
            prop_assert!(mesh.validate().is_ok());
        }
    }
}
