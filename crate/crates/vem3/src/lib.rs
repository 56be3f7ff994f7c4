//! Lowest-order (k = 1) virtual element method for the 3-D Poisson equation on
//! general polyhedral meshes.
//!
//! The pipeline mirrors the classical VEM workflow: build mesh topology and
//! geometry, compute elliptic projections on unique faces, assemble the
//! stabilized stiffness matrix and load vector element by element, apply
//! Neumann/Dirichlet boundary conditions, solve the reduced SPD system and
//! evaluate discrete L2/H1 error norms against a manufactured solution.

pub mod assembly;
pub mod boundary;
pub mod error;
pub mod face_projection;
pub mod geometry;
pub mod local_frame;
pub mod mesh;
pub mod norms;
pub mod quadrature;
pub mod solver;
pub mod sparse;
pub mod study;

pub use error::{Result, VemError};
