//! Quadric-error-metric edge collapse simplification.
//!
//! Classic plane-quadric formulation: every face contributes its plane
//! quadric to its three vertices, edge collapse cost is the combined quadric
//! evaluated at the optimal contraction point, and collapses are applied in
//! min-cost order. Collapses that flip the orientation of a surviving
//! triangle are rejected.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, BTreeSet};

use nalgebra::{Matrix3, Vector3, Vector4};
use ordered_float::OrderedFloat;

use super::TriangleMesh;
use crate::{Error, Result};

/// Simplification output. `reached_target` is false when the collapse queue
/// exhausted before hitting the face budget (pathological non-manifold
/// input); the mesh then holds the best achieved reduction.
#[derive(Debug, Clone)]
pub struct SimplifiedMesh {
    pub mesh: TriangleMesh,
    pub reached_target: bool,
}

/// Symmetric 4x4 plane quadric, stored as the 10 upper-triangle terms.
#[derive(Debug, Clone, Copy, Default)]
struct Quadric {
    m: [f64; 10], // a2 ab ac ad b2 bc bd c2 cd d2
}

impl Quadric {
    fn from_plane(n: Vector3<f64>, d: f64) -> Self {
        let (a, b, c) = (n.x, n.y, n.z);
        Quadric {
            m: [
                a * a,
                a * b,
                a * c,
                a * d,
                b * b,
                b * c,
                b * d,
                c * c,
                c * d,
                d * d,
            ],
        }
    }

    fn add(&mut self, o: &Quadric) {
        for i in 0..10 {
            self.m[i] += o.m[i];
        }
    }

    fn sum(a: &Quadric, b: &Quadric) -> Quadric {
        let mut q = *a;
        q.add(b);
        q
    }

    /// v^T Q v for v = (p, 1).
    fn error(&self, p: Vector3<f64>) -> f64 {
        let v = Vector4::new(p.x, p.y, p.z, 1.0);
        let m = &self.m;
        let q = [
            [m[0], m[1], m[2], m[3]],
            [m[1], m[4], m[5], m[6]],
            [m[2], m[5], m[7], m[8]],
            [m[3], m[6], m[8], m[9]],
        ];
        let mut acc = 0.0;
        for i in 0..4 {
            let mut row = 0.0;
            for j in 0..4 {
                row += q[i][j] * v[j];
            }
            acc += v[i] * row;
        }
        acc
    }

    /// Point minimizing the quadric, i.e. the solution of the 3x3 system from
    /// the gradient. None when the system is near singular.
    fn optimal_point(&self) -> Option<Vector3<f64>> {
        let m = &self.m;
        let a = Matrix3::new(m[0], m[1], m[2], m[1], m[4], m[5], m[2], m[5], m[7]);
        let b = Vector3::new(-m[3], -m[6], -m[8]);
        let det = a.determinant();
        let scale = a.norm().max(1e-300);
        if det.abs() < 1e-10 * scale * scale * scale {
            return None;
        }
        a.try_inverse().map(|inv| inv * b)
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    cost: OrderedFloat<f64>,
    a: u32,
    b: u32,
    stamp_a: u32,
    stamp_b: u32,
    target: Vector3<f64>,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        (self.cost, self.a, self.b) == (other.cost, other.a, other.b)
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.cost, self.a, self.b).cmp(&(other.cost, other.a, other.b))
    }
}

struct Collapser {
    positions: Vec<Vector3<f64>>,
    faces: Vec<[u32; 3]>,
    face_alive: Vec<bool>,
    vertex_alive: Vec<bool>,
    quadrics: Vec<Quadric>,
    /// Incident alive-face ids per vertex.
    incident: Vec<Vec<u32>>,
    /// Bumped whenever a vertex moves or its star changes; stale heap entries
    /// are discarded on pop.
    stamps: Vec<u32>,
    heap: BinaryHeap<Reverse<Candidate>>,
    alive_faces: usize,
}

impl Collapser {
    fn new(mesh: &TriangleMesh) -> Self {
        let nv = mesh.vertices.len();
        let nf = mesh.faces.len();
        let mut incident: Vec<Vec<u32>> = vec![Vec::new(); nv];
        for (fi, f) in mesh.faces.iter().enumerate() {
            for &v in f {
                incident[v as usize].push(fi as u32);
            }
        }
        let mut quadrics = vec![Quadric::default(); nv];
        for f in &mesh.faces {
            if let Some((n, d)) = face_plane(&mesh.vertices, f) {
                let q = Quadric::from_plane(n, d);
                for &v in f {
                    quadrics[v as usize].add(&q);
                }
            }
        }
        Collapser {
            positions: mesh.vertices.clone(),
            faces: mesh.faces.clone(),
            face_alive: vec![true; nf],
            vertex_alive: vec![true; nv],
            quadrics,
            incident,
            stamps: vec![0; nv],
            heap: BinaryHeap::new(),
            alive_faces: nf,
        }
    }

    fn edge_set(&self) -> BTreeSet<(u32, u32)> {
        let mut edges = BTreeSet::new();
        for (fi, f) in self.faces.iter().enumerate() {
            if !self.face_alive[fi] {
                continue;
            }
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges
    }

    fn push_candidate(&mut self, a: u32, b: u32) {
        let q = Quadric::sum(
            &self.quadrics[a as usize],
            &self.quadrics[b as usize],
        );
        let pa = self.positions[a as usize];
        let pb = self.positions[b as usize];
        // Collapse-to-optimal-point, falling back to the best of the edge
        // endpoints and midpoint when the quadric system is singular.
        let target = match q.optimal_point() {
            Some(p) if p.iter().all(|c| c.is_finite()) => p,
            _ => {
                let mid = (pa + pb) / 2.0;
                let mut best = pa;
                let mut best_err = q.error(pa);
                for cand in [pb, mid] {
                    let e = q.error(cand);
                    if e < best_err {
                        best_err = e;
                        best = cand;
                    }
                }
                best
            }
        };
        let cost = q.error(target).max(0.0);
        self.heap.push(Reverse(Candidate {
            cost: OrderedFloat(cost),
            a,
            b,
            stamp_a: self.stamps[a as usize],
            stamp_b: self.stamps[b as usize],
            target,
        }));
    }

    /// True if moving both endpoints to `target` would flip or degenerate any
    /// surviving face around the edge.
    fn collapse_would_flip(&self, a: u32, b: u32, target: Vector3<f64>) -> bool {
        for &v in [a, b].iter() {
            for &fi in &self.incident[v as usize] {
                if !self.face_alive[fi as usize] {
                    continue;
                }
                let f = self.faces[fi as usize];
                let has_a = f.contains(&a);
                let has_b = f.contains(&b);
                if has_a && has_b {
                    continue; // face dies with the collapse
                }
                let before: Vec<Vector3<f64>> =
                    f.iter().map(|&i| self.positions[i as usize]).collect();
                let after: Vec<Vector3<f64>> = f
                    .iter()
                    .map(|&i| {
                        if i == a || i == b {
                            target
                        } else {
                            self.positions[i as usize]
                        }
                    })
                    .collect();
                let n0 = (before[1] - before[0]).cross(&(before[2] - before[0]));
                let n1 = (after[1] - after[0]).cross(&(after[2] - after[0]));
                let n1_norm = n1.norm();
                if n1_norm < 1e-14 {
                    return true; // collapses the face to a sliver
                }
                if n0.norm() > 1e-14 && n0.dot(&n1) <= 0.0 {
                    return true;
                }
            }
        }
        false
    }

    /// Collapse b into a at `target`. Returns faces removed.
    fn apply(&mut self, a: u32, b: u32, target: Vector3<f64>) -> usize {
        let mut removed = 0;
        self.positions[a as usize] = target;
        self.quadrics[a as usize] = Quadric::sum(
            &self.quadrics[a as usize],
            &self.quadrics[b as usize],
        );

        let b_faces = std::mem::take(&mut self.incident[b as usize]);
        for fi in b_faces {
            if !self.face_alive[fi as usize] {
                continue;
            }
            let f = &mut self.faces[fi as usize];
            if f.contains(&a) {
                // Shared face between a and b: dies.
                self.face_alive[fi as usize] = false;
                self.alive_faces -= 1;
                removed += 1;
            } else {
                for slot in f.iter_mut() {
                    if *slot == b {
                        *slot = a;
                    }
                }
                self.incident[a as usize].push(fi);
            }
        }
        self.vertex_alive[b as usize] = false;
        self.stamps[a as usize] = self.stamps[a as usize].wrapping_add(1);
        self.stamps[b as usize] = self.stamps[b as usize].wrapping_add(1);

        // Refresh candidates for every edge around the merged vertex.
        let mut neighbors: BTreeSet<u32> = BTreeSet::new();
        for &fi in &self.incident[a as usize] {
            if !self.face_alive[fi as usize] {
                continue;
            }
            for &v in &self.faces[fi as usize] {
                if v != a && self.vertex_alive[v as usize] {
                    neighbors.insert(v);
                }
            }
        }
        for v in neighbors {
            self.push_candidate(a.min(v), a.max(v));
        }
        removed
    }

    fn run(&mut self, target_faces: usize) -> bool {
        let edges: Vec<(u32, u32)> = self.edge_set().into_iter().collect();
        for (a, b) in edges {
            self.push_candidate(a, b);
        }
        while self.alive_faces > target_faces {
            let Some(Reverse(cand)) = self.heap.pop() else {
                return false;
            };
            let (a, b) = (cand.a, cand.b);
            if !self.vertex_alive[a as usize]
                || !self.vertex_alive[b as usize]
                || cand.stamp_a != self.stamps[a as usize]
                || cand.stamp_b != self.stamps[b as usize]
            {
                continue;
            }
            // The pair must still share at least one alive face to be an edge.
            let still_edge = self.incident[a as usize].iter().any(|&fi| {
                self.face_alive[fi as usize] && self.faces[fi as usize].contains(&b)
            });
            if !still_edge {
                continue;
            }
            if self.collapse_would_flip(a, b, cand.target) {
                continue;
            }
            self.apply(a, b, cand.target);
        }
        true
    }

    fn into_mesh(self) -> TriangleMesh {
        let mut remap: Vec<u32> = vec![u32::MAX; self.positions.len()];
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        for (fi, f) in self.faces.iter().enumerate() {
            if !self.face_alive[fi] {
                continue;
            }
            let mut tri = [0u32; 3];
            for (k, &v) in f.iter().enumerate() {
                if remap[v as usize] == u32::MAX {
                    remap[v as usize] = vertices.len() as u32;
                    vertices.push(self.positions[v as usize]);
                }
                tri[k] = remap[v as usize];
            }
            faces.push(tri);
        }
        TriangleMesh { vertices, faces }
    }
}

fn face_plane(verts: &[Vector3<f64>], f: &[u32; 3]) -> Option<(Vector3<f64>, f64)> {
    let a = verts[f[0] as usize];
    let b = verts[f[1] as usize];
    let c = verts[f[2] as usize];
    let n = (b - a).cross(&(c - a));
    let len = n.norm();
    if len < 1e-14 {
        return None;
    }
    let n = n / len;
    Some((n, -n.dot(&a)))
}

/// Simplifies to at most `target_faces` faces. Meshes already at or under the
/// budget pass through unchanged.
pub fn simplify_mesh(mesh: &TriangleMesh, target_faces: usize) -> Result<SimplifiedMesh> {
    if target_faces < 4 {
        return Err(Error::InvalidInput(format!(
            "target_faces must be >= 4, got {target_faces}"
        )));
    }
    mesh.validate()?;
    if mesh.face_count() <= target_faces {
        return Ok(SimplifiedMesh {
            mesh: mesh.clone(),
            reached_target: true,
        });
    }
    let mut collapser = Collapser::new(mesh);
    let reached = collapser.run(target_faces);
    let out = collapser.into_mesh();
    out.validate()?;
    Ok(SimplifiedMesh {
        mesh: out,
        reached_target: reached,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::hausdorff_distance;
    use crate::mesh::primitives::icosphere;

    #[test]
    fn under_budget_passes_through() {
        let m = icosphere(1.0, 2); // 320 faces
        let s = simplify_mesh(&m, 2000).unwrap();
        assert!(s.reached_target);
        assert_eq!(s.mesh.faces, m.faces);
        assert_eq!(s.mesh.vertices, m.vertices);
    }

    #[test]
    fn sphere_reduction_hits_budget() {
        let m = icosphere(1.0, 3); // 1280 faces
        let s = simplify_mesh(&m, 300).unwrap();
        assert!(s.reached_target);
        assert!(s.mesh.face_count() <= 300);
        s.mesh.validate().unwrap();
        // Geometry preserved: sampled Hausdorff well under 2% of bbox diagonal.
        let d = hausdorff_distance(&m, &s.mesh, 4000).unwrap();
        let diag = m.bounding_box_diagonal().unwrap();
        assert!(d <= 0.02 * diag, "hausdorff {d} vs budget {}", 0.02 * diag);
    }

    #[test]
    fn rejects_tiny_target() {
        let m = icosphere(1.0, 1);
        assert!(simplify_mesh(&m, 3).is_err());
    }

    #[test]
    fn result_faces_reference_valid_vertices() {
        let m = icosphere(2.0, 3);
        let s = simplify_mesh(&m, 200).unwrap();
        s.mesh.validate().unwrap();
        assert!(s.mesh.face_count() <= 200);
        // All vertices on the original sphere within the decimation error.
        for v in &s.mesh.vertices {
            assert!((v.norm() - 2.0).abs() < 0.2);
        }
    }
}
