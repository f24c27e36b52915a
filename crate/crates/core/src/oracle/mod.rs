//! Shoebox ground-truth oracle: box-room scene meshes, image-source impulse
//! responses, and randomized dataset manifests. This stands in for a large
//! simulated IR corpus at desk scale; furniture shapes the mesh (and thus the
//! encoder input) but is ignored acoustically.

mod dataset;
mod image;

pub use dataset::{build_dataset, load_manifest, DatasetConfig, ManifestRow};
pub use image::{image_method_ir, SPEED_OF_SOUND};

use nalgebra::Vector3;

use crate::mesh::{primitives::axis_aligned_box, TriangleMesh};
use crate::{Error, Result};

/// Axis-aligned furniture box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisBox {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl AxisBox {
    pub fn is_valid(&self) -> bool {
        self.min.x < self.max.x && self.min.y < self.max.y && self.min.z < self.max.z
    }
}

/// Rectangular room with per-surface absorption and optional box furniture.
/// Absorption order: x=0, x=Lx, y=0, y=Ly, z=0 (floor), z=Lz (ceiling).
#[derive(Debug, Clone, PartialEq)]
pub struct BoxScene {
    pub dims: Vector3<f64>,
    pub absorption: [f64; 6],
    pub furniture: Vec<AxisBox>,
}

impl BoxScene {
    pub fn new(dims: Vector3<f64>, absorption: [f64; 6]) -> Self {
        BoxScene {
            dims,
            absorption,
            furniture: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dims.x > 0.0 && self.dims.y > 0.0 && self.dims.z > 0.0) {
            return Err(Error::InvalidInput(format!(
                "room dimensions must be positive, got {:?}",
                self.dims
            )));
        }
        for (i, &a) in self.absorption.iter().enumerate() {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::InvalidInput(format!(
                    "absorption[{i}] = {a} outside [0, 1]"
                )));
            }
        }
        for (i, f) in self.furniture.iter().enumerate() {
            if !f.is_valid() {
                return Err(Error::InvalidInput(format!("furniture box {i} degenerate")));
            }
            if f.min.x < 0.0
                || f.min.y < 0.0
                || f.min.z < 0.0
                || f.max.x > self.dims.x
                || f.max.y > self.dims.y
                || f.max.z > self.dims.z
            {
                return Err(Error::InvalidInput(format!(
                    "furniture box {i} extends outside the room"
                )));
            }
        }
        Ok(())
    }

    pub fn contains_strictly(&self, p: Vector3<f64>) -> bool {
        p.x > 0.0
            && p.y > 0.0
            && p.z > 0.0
            && p.x < self.dims.x
            && p.y < self.dims.y
            && p.z < self.dims.z
    }
}

/// Scene mesh: inward-facing room shell (12 triangles) plus 12 outward-facing
/// triangles per furniture box.
pub fn make_box_scene(scene: &BoxScene) -> Result<TriangleMesh> {
    scene.validate()?;
    let mut mesh = axis_aligned_box(Vector3::zeros(), scene.dims, true);
    for f in &scene.furniture {
        let b = axis_aligned_box(f.min, f.max, false);
        let base = mesh.vertices.len() as u32;
        mesh.vertices.extend(b.vertices);
        mesh.faces
            .extend(b.faces.iter().map(|t| [t[0] + base, t[1] + base, t[2] + base]));
    }
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::vector;

    #[test]
    fn empty_room_is_12_triangles() {
        let scene = BoxScene::new(vector![5.0, 4.0, 3.0], [0.3; 6]);
        let m = make_box_scene(&scene).unwrap();
        assert_eq!(m.face_count(), 12);
        let (lo, hi) = m.bounding_box().unwrap();
        assert_eq!(lo, vector![0.0, 0.0, 0.0]);
        assert_eq!(hi, vector![5.0, 4.0, 3.0]);
    }

    #[test]
    fn furniture_adds_12_each() {
        let mut scene = BoxScene::new(vector![6.0, 5.0, 3.0], [0.5; 6]);
        for i in 0..3 {
            let o = i as f64;
            scene.furniture.push(AxisBox {
                min: vector![1.0 + o, 1.0, 0.0],
                max: vector![1.5 + o, 1.8, 0.9],
            });
        }
        let m = make_box_scene(&scene).unwrap();
        assert_eq!(m.face_count(), 48);
    }

    #[test]
    fn degenerate_dimension_rejected() {
        let scene = BoxScene::new(vector![5.0, 0.0, 3.0], [0.3; 6]);
        assert!(make_box_scene(&scene).is_err());
    }

    #[test]
    fn furniture_outside_room_rejected() {
        let mut scene = BoxScene::new(vector![4.0, 4.0, 3.0], [0.3; 6]);
        scene.furniture.push(AxisBox {
            min: vector![3.0, 3.0, 0.0],
            max: vector![5.0, 3.5, 1.0],
        });
        assert!(make_box_scene(&scene).is_err());
    }

    #[test]
    fn absorption_out_of_range_rejected() {
        let scene = BoxScene::new(vector![4.0, 4.0, 3.0], [1.1, 0.3, 0.3, 0.3, 0.3, 0.3]);
        assert!(scene.validate().is_err());
    }
}
