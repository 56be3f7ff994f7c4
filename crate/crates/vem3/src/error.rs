//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, VemError>;

#[derive(Debug, Error)]
pub enum VemError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("element {element}, face {face}: vertex index {index} out of range (mesh has {n_nodes} nodes)")]
    IndexOutOfRange {
        element: usize,
        face: usize,
        index: usize,
        n_nodes: usize,
    },
    #[error("element {element}, face {face}: face has fewer than 3 distinct vertices")]
    FaceTooSmall { element: usize, face: usize },
    #[error("element {element}: edge ({a},{b}) appears in {count} faces instead of 2 (element surface not closed)")]
    OpenSurface {
        element: usize,
        a: usize,
        b: usize,
        count: usize,
    },
    #[error("face {vertices:?} is referenced by more than two elements (non-manifold mesh)")]
    NonManifold { vertices: Vec<usize> },
    #[error("unsupported boundary predicate '{0}' (expected e.g. \"x==0\", unions with '|', or \"none\")")]
    UnsupportedPredicate(String),
    #[error("element {element} is degenerate: {reason}")]
    DegenerateElement { element: usize, reason: String },
    #[error("degenerate face: {0}")]
    DegenerateFace(String),
    #[error("polygon is not star-shaped with respect to its centroid")]
    NotStarShapedPolygon,
    #[error("element {element} is not star-shaped with respect to its vertex mean")]
    NotStarShapedElement { element: usize },
    #[error("quadrature degree {0} is not supported (expected 1..=4)")]
    UnsupportedDegree(usize),
    #[error("missing face projection for face {0}")]
    MissingFaceProjection(usize),
    #[error("matrix is not symmetric positive definite (breakdown at row {row})")]
    NotSpd { row: usize },
    #[error("conjugate gradient did not converge in {max_iter} iterations (relative residual {residual:.3e})")]
    CgDidNotConverge { max_iter: usize, residual: f64 },
    #[error("no Dirichlet node found: pure Neumann problems are singular and not supported")]
    PureNeumann,
    #[error("unknown solution preset '{0}' (available: linear, quadratic, trig)")]
    UnknownPreset(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("study level {level}: {source}")]
    StudyLevel {
        level: usize,
        #[source]
        source: Box<VemError>,
    },
}

impl VemError {
    /// CLI exit code: 2 for usage/configuration problems, 1 for numerical or
    /// input-data failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            VemError::UnsupportedPredicate(_)
            | VemError::UnknownPreset(_)
            | VemError::UnsupportedDegree(_)
            | VemError::Config(_) => 2,
            VemError::StudyLevel { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
