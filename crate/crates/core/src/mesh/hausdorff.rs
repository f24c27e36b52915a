//! Sampled symmetric Hausdorff distance between triangle meshes.

use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::TriangleMesh;
use crate::{Error, Result};

/// Symmetric Hausdorff estimate: `samples` points drawn uniformly by area on
/// each surface, each measured to the nearest point on the other surface
/// (exact point-triangle distance), maximum over both directions.
pub fn hausdorff_distance(a: &TriangleMesh, b: &TriangleMesh, samples: usize) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be >= 1".into()));
    }
    if a.faces.is_empty() || b.faces.is_empty() {
        return Err(Error::InvalidMesh("hausdorff needs non-empty meshes".into()));
    }
    // One shared seed keeps the estimate exactly symmetric in (a, b).
    let d_ab = one_sided(a, b, samples, 0x4a5d)?;
    let d_ba = one_sided(b, a, samples, 0x4a5d)?;
    Ok(d_ab.max(d_ba))
}

fn one_sided(from: &TriangleMesh, to: &TriangleMesh, samples: usize, seed: u64) -> Result<f64> {
    let points = sample_surface(from, samples, seed)?;
    let tris: Vec<[Vector3<f64>; 3]> = to
        .faces
        .iter()
        .map(|f| {
            [
                to.vertices[f[0] as usize],
                to.vertices[f[1] as usize],
                to.vertices[f[2] as usize],
            ]
        })
        .collect();
    let max = points
        .par_iter()
        .map(|p| {
            tris.iter()
                .map(|t| point_triangle_distance_squared(*p, t))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max);
    Ok(max.sqrt())
}

/// Uniform area sampling: cumulative-area table + barycentric draw per point.
fn sample_surface(mesh: &TriangleMesh, samples: usize, seed: u64) -> Result<Vec<Vector3<f64>>> {
    let mut cumulative = Vec::with_capacity(mesh.faces.len());
    let mut total = 0.0;
    for f in &mesh.faces {
        let a = mesh.vertices[f[0] as usize];
        let b = mesh.vertices[f[1] as usize];
        let c = mesh.vertices[f[2] as usize];
        total += 0.5 * (b - a).cross(&(c - a)).norm();
        cumulative.push(total);
    }
    if total <= 0.0 {
        return Err(Error::InvalidMesh(
            "degenerate zero-area mesh cannot be sampled".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let t = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c < t).min(mesh.faces.len() - 1);
        let f = mesh.faces[idx];
        let a = mesh.vertices[f[0] as usize];
        let b = mesh.vertices[f[1] as usize];
        let c = mesh.vertices[f[2] as usize];
        // Uniform barycentric point via square-root trick.
        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        let s = r1.sqrt();
        out.push(a * (1.0 - s) + b * (s * (1.0 - r2)) + c * (s * r2));
    }
    Ok(out)
}

/// Squared distance from a point to a triangle (region-based closest-point
/// projection).
fn point_triangle_distance_squared(p: Vector3<f64>, tri: &[Vector3<f64>; 3]) -> f64 {
    let [a, b, c] = *tri;
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;

    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm_squared(); // vertex a
    }

    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm_squared(); // vertex b
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (ap - ab * v).norm_squared(); // edge ab
    }

    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm_squared(); // vertex c
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (ap - ac * w).norm_squared(); // edge ac
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        let q = b + (c - b) * w;
        return (p - q).norm_squared(); // edge bc
    }

    // Interior: project onto the plane.
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    let q = a + ab * v + ac * w;
    (p - q).norm_squared()
}
