//! Minimal Wavefront OBJ reader and writer for triangle meshes.
//!
//! Only `v` and `f` records are interpreted; other records are ignored.
//! Face entries may use the `v/vt/vn` forms and negative (relative) indices.
//! Faces with more than three vertices are rejected.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Vec3;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriMesh {
    pub positions: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

pub fn parse_obj(src: &str, origin: &str) -> Result<TriMesh> {
    let mut mesh = TriMesh::default();
    let err = |line: usize, msg: String| Error::Parse {
        path: origin.to_string(),
        line,
        msg,
    };
    for (lineno, raw) in src.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|e| err(line, format!("bad coordinate `{t}`: {e}")))
                    })
                    .collect::<Result<_>>()?;
                if coords.len() != 3 || !coords.iter().all(|c| c.is_finite()) {
                    return Err(err(line, "vertex needs three finite coordinates".into()));
                }
                mesh.positions.push(Vec3([coords[0], coords[1], coords[2]]));
            }
            Some("f") => {
                let refs: Vec<&str> = tokens.collect();
                if refs.len() != 3 {
                    return Err(err(
                        line,
                        format!("only triangles are supported, face has {} vertices", refs.len()),
                    ));
                }
                let mut tri = [0usize; 3];
                for (slot, r) in tri.iter_mut().zip(&refs) {
                    let idx_str = r.split('/').next().unwrap_or("");
                    let idx: i64 = idx_str
                        .parse()
                        .map_err(|_| err(line, format!("bad face index `{r}`")))?;
                    let n = mesh.positions.len() as i64;
                    let resolved = if idx > 0 { idx - 1 } else { n + idx };
                    if idx == 0 || resolved < 0 || resolved >= n {
                        return Err(err(line, format!("face index {idx} out of range")));
                    }
                    *slot = resolved as usize;
                }
                mesh.triangles.push(tri);
            }
            _ => {}
        }
    }
    Ok(mesh)
}

pub fn read_obj(path: &Path) -> Result<TriMesh> {
    let src = std::fs::read_to_string(path)?;
    parse_obj(&src, &path.display().to_string())
}

pub fn format_obj(positions: &[Vec3], triangles: &[[usize; 3]]) -> String {
    let mut out = String::new();
    for p in positions {
        // `{:?}` is the shortest round-tripping representation
        let _ = writeln!(out, "v {:?} {:?} {:?}", p.0[0], p.0[1], p.0[2]);
    }
    for t in triangles {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}

pub fn write_obj(path: &Path, positions: &[Vec3], triangles: &[[usize; 3]]) -> Result<()> {
    std::fs::write(path, format_obj(positions, triangles))?;
    Ok(())
}

/// Square sheet `[0, size]²` in the z = 0 plane, `n × n` quads each split
/// along the diagonal into two triangles. Vertex `(i, j)` has index
/// `j (n + 1) + i`.
pub fn quad_split_square(n: usize, size: f64) -> TriMesh {
    let mut positions = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            positions.push(Vec3::new(size * i as f64 / n as f64, size * j as f64 / n as f64, 0.0));
        }
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    TriMesh { positions, triangles }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_vertices_and_faces() {
        let src = "# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1\nf -3 -2 -1\n";
        let m = parse_obj(src, "mem").unwrap();
        assert_eq!(m.positions.len(), 3);
        assert_eq!(m.triangles, vec![[0, 1, 2], [0, 1, 2]]);
    }

    #[test]
    fn rejects_quads_and_bad_indices() {
        let quad = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        assert!(matches!(parse_obj(quad, "q"), Err(Error::Parse { line: 5, .. })));
        assert!(parse_obj("v 0 0 0\nf 1 2 3\n", "r").is_err());
        assert!(parse_obj("v 0 nan 0\n", "n").is_err());
    }

    #[test]
    fn round_trips_through_text() {
        let m = quad_split_square(2, 1.0);
        let back = parse_obj(&format_obj(&m.positions, &m.triangles), "rt").unwrap();
        assert_eq!(back, m);
    }
}
