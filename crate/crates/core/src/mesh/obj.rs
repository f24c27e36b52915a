//! Wavefront OBJ input/output. Only `v` and `f` records are interpreted;
//! texture coordinates, normals, materials, and groups are skipped. Polygons
//! with more than three vertices are fan-triangulated.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::Vector3;

use super::TriangleMesh;
use crate::{Error, Result};

pub fn load_mesh<P: AsRef<Path>>(path: P) -> Result<TriangleMesh> {
    let text = fs::read_to_string(path.as_ref())?;
    parse_obj(&text)
}

pub fn parse_obj(text: &str) -> Result<TriangleMesh> {
    let mut vertices: Vec<Vector3<f64>> = Vec::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        match parts.next() {
            Some("v") => {
                let coords: Vec<&str> = parts.collect();
                if coords.len() < 3 {
                    return Err(Error::ObjParse {
                        line,
                        msg: format!("vertex record needs 3 coordinates, got {}", coords.len()),
                    });
                }
                let mut v = [0.0f64; 3];
                for (i, c) in coords.iter().take(3).enumerate() {
                    v[i] = c.parse::<f64>().map_err(|_| Error::ObjParse {
                        line,
                        msg: format!("bad coordinate {c:?}"),
                    })?;
                    if !v[i].is_finite() {
                        return Err(Error::ObjParse {
                            line,
                            msg: format!("non-finite coordinate {c:?}"),
                        });
                    }
                }
                vertices.push(Vector3::new(v[0], v[1], v[2]));
            }
            Some("f") => {
                let idx: Vec<u32> = parts
                    .map(|tok| parse_face_index(tok, vertices.len(), line))
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(Error::ObjParse {
                        line,
                        msg: format!("face needs at least 3 vertices, got {}", idx.len()),
                    });
                }
                // Fan triangulation for quads and larger polygons.
                for k in 1..idx.len() - 1 {
                    let tri = [idx[0], idx[k], idx[k + 1]];
                    if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                        return Err(Error::ObjParse {
                            line,
                            msg: format!("face repeats vertex index {tri:?}"),
                        });
                    }
                    faces.push(tri);
                }
            }
            // vt/vn/vp, o/g/s, mtllib/usemtl and anything else is ignored.
            _ => {}
        }
    }

    TriangleMesh::new(vertices, faces)
}

/// Parses one face token (`7`, `7/1`, `7//3`, `-1`) into a zero-based vertex
/// index. Negative indices count back from the current vertex list.
fn parse_face_index(tok: &str, vertex_count: usize, line: usize) -> Result<u32> {
    let vstr = tok.split('/').next().unwrap_or("");
    let raw: i64 = vstr.parse().map_err(|_| Error::ObjParse {
        line,
        msg: format!("bad face index {tok:?}"),
    })?;
    let resolved = if raw > 0 {
        raw - 1
    } else if raw < 0 {
        vertex_count as i64 + raw
    } else {
        return Err(Error::ObjParse {
            line,
            msg: "face index 0 is not valid in OBJ".into(),
        });
    };
    if resolved < 0 || resolved >= vertex_count as i64 {
        return Err(Error::ObjParse {
            line,
            msg: format!(
                "face index {raw} out of range (mesh has {vertex_count} vertices so far)"
            ),
        });
    }
    Ok(resolved as u32)
}

pub fn write_obj<P: AsRef<Path>>(mesh: &TriangleMesh, path: P) -> Result<()> {
    let mut out = String::new();
    for v in &mesh.vertices {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    for f in &mesh.faces {
        out.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
    }
    let mut file = fs::File::create(path.as_ref())?;
    file.write_all(out.as_bytes())?;
    Ok(())
}
