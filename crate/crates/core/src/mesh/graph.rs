//! Mesh-to-graph conversion: vertex welding and undirected edge extraction.

use std::collections::{BTreeSet, HashMap};

use nalgebra::Vector3;

use super::TriangleMesh;
use crate::{Error, Result};

/// OBJ exports commonly duplicate vertices per face; welding at this
/// tolerance restores the connectivity message passing needs.
pub const DEFAULT_WELD_EPSILON: f64 = 1e-4;

/// Undirected graph over scene vertices: 3D coordinates as node features,
/// triangle sides as edges. The base adjacency carries no self-loops; the
/// encoder adds them as `A + I` internally.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneGraph {
    pub coords: Vec<Vector3<f64>>,
    /// Sorted, deduplicated pairs with `a < b`.
    pub edges: Vec<(u32, u32)>,
}

impl SceneGraph {
    pub fn node_count(&self) -> usize {
        self.coords.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.coords.len() as u32;
        let mut seen = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a >= n || b >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({a},{b}) references node >= {n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidInput(format!("self-loop on node {a}")));
            }
            if a > b {
                return Err(Error::InvalidInput(format!("edge ({a},{b}) not sorted")));
            }
            if !seen.insert((a, b)) {
                return Err(Error::InvalidInput(format!("duplicate edge ({a},{b})")));
            }
        }
        Ok(())
    }

    /// Node feature matrix (N x 3 vertex coordinates) as row-major data.
    pub fn coord_features(&self) -> ndarray::Array2<f64> {
        let mut x = ndarray::Array2::zeros((self.coords.len(), 3));
        for (i, c) in self.coords.iter().enumerate() {
            x[[i, 0]] = c.x;
            x[[i, 1]] = c.y;
            x[[i, 2]] = c.z;
        }
        x
    }
}

/// Converts a mesh to a graph: vertices within `weld_epsilon` are merged
/// (union-find over a spatial hash grid), each triangle contributes its three
/// sides as undirected edges, duplicates and degenerate self-edges removed.
pub fn mesh_to_graph(mesh: &TriangleMesh, weld_epsilon: f64) -> Result<SceneGraph> {
    if weld_epsilon < 0.0 || !weld_epsilon.is_finite() {
        return Err(Error::InvalidInput(format!(
            "weld_epsilon must be finite and >= 0, got {weld_epsilon}"
        )));
    }
    let n = mesh.vertices.len();
    let remap = weld_map(&mesh.vertices, weld_epsilon);

    // Compact representative indices in first-occurrence order.
    let mut compact: Vec<u32> = vec![u32::MAX; n];
    let mut coords: Vec<Vector3<f64>> = Vec::new();
    for i in 0..n {
        let rep = remap[i];
        if compact[rep] == u32::MAX {
            compact[rep] = coords.len() as u32;
            coords.push(mesh.vertices[rep]);
        }
    }
    // Drop unreferenced representatives? No: every vertex maps to one, so all
    // representatives are retained (isolated vertices stay isolated nodes).

    let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for f in &mesh.faces {
        let m = [
            compact[remap[f[0] as usize]],
            compact[remap[f[1] as usize]],
            compact[remap[f[2] as usize]],
        ];
        for (a, b) in [(m[0], m[1]), (m[1], m[2]), (m[2], m[0])] {
            if a != b {
                edges.insert((a.min(b), a.max(b)));
            }
        }
    }

    Ok(SceneGraph {
        coords,
        edges: edges.into_iter().collect(),
    })
}

/// Union-find welding: vertices closer than `eps` end up with one
/// representative (the smallest index of the merged set).
fn weld_map(vertices: &[Vector3<f64>], eps: f64) -> Vec<usize> {
    let n = vertices.len();
    let mut parent: Vec<usize> = (0..n).collect();

    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    fn union(parent: &mut Vec<usize>, a: usize, b: usize) {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            // Keep the smaller index as the representative.
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            parent[hi] = lo;
        }
    }

    if eps > 0.0 {
        let cell = |v: &Vector3<f64>| {
            (
                (v.x / eps).floor() as i64,
                (v.y / eps).floor() as i64,
                (v.z / eps).floor() as i64,
            )
        };
        let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            grid.entry(cell(v)).or_default().push(i);
        }
        let eps2 = eps * eps;
        for (i, v) in vertices.iter().enumerate() {
            let (cx, cy, cz) = cell(v);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(bucket) = grid.get(&(cx + dx, cy + dy, cz + dz)) {
                            for &j in bucket {
                                if j > i && (vertices[j] - v).norm_squared() <= eps2 {
                                    union(&mut parent, i, j);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    (0..n).map(|i| find(&mut parent, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::vector;

    fn tri(verts: Vec<Vector3<f64>>, faces: Vec<[u32; 3]>) -> TriangleMesh {
        TriangleMesh::new(verts, faces).unwrap()
    }

    #[test]
    fn single_triangle_3_nodes_3_edges() {
        let m = tri(
            vec![
                vector![0.0, 0.0, 0.0],
                vector![1.0, 0.0, 0.0],
                vector![0.0, 1.0, 0.0],
            ],
            vec![[0, 1, 2]],
        );
        let g = mesh_to_graph(&m, DEFAULT_WELD_EPSILON).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        g.validate().unwrap();
    }

    #[test]
    fn shared_edge_deduplicated() {
        let m = tri(
            vec![
                vector![0.0, 0.0, 0.0],
                vector![1.0, 0.0, 0.0],
                vector![0.0, 1.0, 0.0],
                vector![1.0, 1.0, 0.0],
            ],
            vec![[0, 1, 2], [1, 3, 2]],
        );
        let g = mesh_to_graph(&m, DEFAULT_WELD_EPSILON).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 5);
    }

    #[test]
    fn coincident_vertices_weld() {
        // Two triangles sharing an edge geometrically but with duplicated
        // vertices, as unindexed OBJ exports produce.
        let m = tri(
            vec![
                vector![0.0, 0.0, 0.0],
                vector![1.0, 0.0, 0.0],
                vector![0.0, 1.0, 0.0],
                vector![1.0, 0.00000001, 0.0], // coincides with vertex 1
                vector![0.0, 1.0, 0.00000002], // coincides with vertex 2
                vector![1.0, 1.0, 0.0],
            ],
            vec![[0, 1, 2], [3, 5, 4]],
        );
        let g = mesh_to_graph(&m, 1e-4).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 5);
    }

    #[test]
    fn empty_mesh_empty_graph() {
        let m = TriangleMesh {
            vertices: vec![],
            faces: vec![],
        };
        let g = mesh_to_graph(&m, 1e-4).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn edges_invariant_to_face_order() {
        let verts = vec![
            vector![0.0, 0.0, 0.0],
            vector![1.0, 0.0, 0.0],
            vector![0.0, 1.0, 0.0],
            vector![1.0, 1.0, 0.0],
        ];
        let a = mesh_to_graph(&tri(verts.clone(), vec![[0, 1, 2], [1, 3, 2]]), 1e-4).unwrap();
        let b = mesh_to_graph(&tri(verts, vec![[1, 3, 2], [0, 1, 2]]), 1e-4).unwrap();
        assert_eq!(a.edges, b.edges);
    }

    #[test]
    fn degenerate_welded_triangle_drops_self_loop() {
        let m = tri(
            vec![
                vector![0.0, 0.0, 0.0],
                vector![1e-6, 0.0, 0.0],
                vector![0.0, 1.0, 0.0],
            ],
            vec![[0, 1, 2]],
        );
        let g = mesh_to_graph(&m, 1e-4).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        g.validate().unwrap();
    }
}
