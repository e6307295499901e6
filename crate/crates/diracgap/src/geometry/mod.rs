//! Domain geometry: parametrized boundary curves and structured triangulations.

mod curve;
mod mesh;

pub use curve::{BoundaryCurve, CurvePoint, Harmonic};
pub use mesh::{
    triangulate, triangulate_rings, BoundaryEdge, BoundaryGaussNode, BoundaryVertex, Mesh,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("mesh size h = {h} outside (0, diameter/4) with diameter {diameter:.4}")]
    BadMeshSize { h: f64, diameter: f64 },
    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),
}
