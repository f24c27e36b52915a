//! Procedural test and benchmark geometry.

use std::collections::HashMap;

use nalgebra::Vector3;

use super::TriangleMesh;

/// Axis-aligned box `[min, max]` as 12 triangles over 8 shared vertices.
/// `inward` flips the winding so face normals point into the box interior
/// (used for room shells).
pub fn axis_aligned_box(min: Vector3<f64>, max: Vector3<f64>, inward: bool) -> TriangleMesh {
    let v = |x: f64, y: f64, z: f64| Vector3::new(x, y, z);
    let vertices = vec![
        v(min.x, min.y, min.z),
        v(max.x, min.y, min.z),
        v(max.x, max.y, min.z),
        v(min.x, max.y, min.z),
        v(min.x, min.y, max.z),
        v(max.x, min.y, max.z),
        v(max.x, max.y, max.z),
        v(min.x, max.y, max.z),
    ];
    // Outward-facing winding (CCW seen from outside).
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 2, 1],
        [0, 3, 2], // z = min
        [4, 5, 6],
        [4, 6, 7], // z = max
        [0, 1, 5],
        [0, 5, 4], // y = min
        [2, 3, 7],
        [2, 7, 6], // y = max
        [0, 4, 7],
        [0, 7, 3], // x = min
        [1, 2, 6],
        [1, 6, 5], // x = max
    ];
    if inward {
        for f in &mut faces {
            f.swap(1, 2);
        }
    }
    TriangleMesh { vertices, faces }
}

pub fn unit_cube() -> TriangleMesh {
    axis_aligned_box(Vector3::zeros(), Vector3::new(1.0, 1.0, 1.0), false)
}

/// Icosphere of the given radius: an icosahedron with every face split
/// four-ways `subdivisions` times, vertices projected back to the sphere.
/// Face count is `20 * 4^subdivisions` (5 subdivisions -> 20480).
pub fn icosphere(radius: f64, subdivisions: u32) -> TriangleMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vector3<f64>> = vec![
        Vector3::new(-1.0, phi, 0.0),
        Vector3::new(1.0, phi, 0.0),
        Vector3::new(-1.0, -phi, 0.0),
        Vector3::new(1.0, -phi, 0.0),
        Vector3::new(0.0, -1.0, phi),
        Vector3::new(0.0, 1.0, phi),
        Vector3::new(0.0, -1.0, -phi),
        Vector3::new(0.0, 1.0, -phi),
        Vector3::new(phi, 0.0, -1.0),
        Vector3::new(phi, 0.0, 1.0),
        Vector3::new(-phi, 0.0, -1.0),
        Vector3::new(-phi, 0.0, 1.0),
    ];
    for v in &mut vertices {
        *v = v.normalize() * radius;
    }
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mid = |a: u32, b: u32, verts: &mut Vec<Vector3<f64>>, cache: &mut HashMap<(u32, u32), u32>| {
                let key = (a.min(b), a.max(b));
                *cache.entry(key).or_insert_with(|| {
                    let m = ((verts[a as usize] + verts[b as usize]) / 2.0).normalize() * radius;
                    verts.push(m);
                    (verts.len() - 1) as u32
                })
            };
            let ab = mid(f[0], f[1], &mut vertices, &mut midpoint);
            let bc = mid(f[1], f[2], &mut vertices, &mut midpoint);
            let ca = mid(f[2], f[0], &mut vertices, &mut midpoint);
            next.push([f[0], ab, ca]);
            next.push([f[1], bc, ab]);
            next.push([f[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }

    TriangleMesh { vertices, faces }
}
