//! Scene mesh pipeline: OBJ loading, quadric simplification, Hausdorff
//! distance, graph conversion, and canonical placement.

mod graph;
mod hausdorff;
mod obj;
pub mod primitives;
mod simplify;

pub use graph::{mesh_to_graph, SceneGraph, DEFAULT_WELD_EPSILON};
pub use hausdorff::hausdorff_distance;
pub use obj::{load_mesh, parse_obj, write_obj};
pub use simplify::{simplify_mesh, SimplifiedMesh};

use nalgebra::Vector3;

use crate::{Error, Result};

/// Indexed triangle soup of a scene, coordinates in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vector3<f64>>,
    pub faces: Vec<[u32; 3]>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vector3<f64>>, faces: Vec<[u32; 3]>) -> Result<Self> {
        let mesh = TriangleMesh { vertices, faces };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Checks the structural invariants: finite coordinates, in-range face
    /// indices, and no face repeating a vertex index.
    pub fn validate(&self) -> Result<()> {
        for (i, v) in self.vertices.iter().enumerate() {
            if !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite()) {
                return Err(Error::InvalidMesh(format!(
                    "vertex {i} has non-finite coordinates"
                )));
            }
        }
        let n = self.vertices.len() as u32;
        for (i, f) in self.faces.iter().enumerate() {
            for &idx in f {
                if idx >= n {
                    return Err(Error::InvalidMesh(format!(
                        "face {i} references vertex {idx} but mesh has {n} vertices"
                    )));
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::InvalidMesh(format!(
                    "face {i} repeats a vertex index: {f:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Axis-aligned bounding box as (min, max). Errors on an empty mesh.
    pub fn bounding_box(&self) -> Result<(Vector3<f64>, Vector3<f64>)> {
        if self.vertices.is_empty() {
            return Err(Error::InvalidMesh("empty mesh has no bounding box".into()));
        }
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        Ok((lo, hi))
    }

    pub fn bounding_box_diagonal(&self) -> Result<f64> {
        let (lo, hi) = self.bounding_box()?;
        Ok((hi - lo).norm())
    }

    /// Total surface area.
    pub fn surface_area(&self) -> f64 {
        self.faces.iter().map(|f| self.face_area(*f)).sum()
    }

    fn face_area(&self, f: [u32; 3]) -> f64 {
        let a = self.vertices[f[0] as usize];
        let b = self.vertices[f[1] as usize];
        let c = self.vertices[f[2] as usize];
        0.5 * (b - a).cross(&(c - a)).norm()
    }
}

/// Rigid translation putting the bounding-box minimum at the origin, applied
/// identically to the mesh and both positions. No scaling: absolute room size
/// carries acoustic meaning.
pub fn normalize_scene(
    mesh: &TriangleMesh,
    source: Vector3<f64>,
    listener: Vector3<f64>,
) -> Result<(TriangleMesh, Vector3<f64>, Vector3<f64>)> {
    let (lo, hi) = mesh.bounding_box()?;
    for (name, p) in [("source", source), ("listener", listener)] {
        if p.x < lo.x || p.y < lo.y || p.z < lo.z || p.x > hi.x || p.y > hi.y || p.z > hi.z {
            return Err(Error::InvalidInput(format!(
                "{name} position {p:?} lies outside the mesh bounding box [{lo:?}, {hi:?}]"
            )));
        }
    }
    let mut out = mesh.clone();
    for v in &mut out.vertices {
        *v -= lo;
    }
    Ok((out, source - lo, listener - lo))
}
