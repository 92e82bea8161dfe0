//! OBJ and binary PLY mesh files.

use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::mesh::TriMesh;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    #[default]
    Ply,
}

impl MeshFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MeshFormat::Obj => "obj",
            MeshFormat::Ply => "ply",
        }
    }

    pub fn from_path(p: &Path) -> Option<Self> {
        match p.extension()?.to_str()? {
            "obj" => Some(MeshFormat::Obj),
            "ply" => Some(MeshFormat::Ply),
            _ => None,
        }
    }
}

pub fn obj_string(mesh: &TriMesh) -> String {
    let normals = mesh.vertex_normals();
    let mut s = String::with_capacity(mesh.positions.len() * 80);
    for p in &mesh.positions {
        let _ = writeln!(s, "v {} {} {}", p.x, p.y, p.z);
    }
    for n in &normals {
        let _ = writeln!(s, "vn {} {} {}", n.x, n.y, n.z);
    }
    for t in &mesh.triangles {
        let (a, b, c) = (t[0] + 1, t[1] + 1, t[2] + 1);
        let _ = writeln!(s, "f {a}//{a} {b}//{b} {c}//{c}");
    }
    s
}

/// Polyline OBJ with one closed `l` record.
pub fn obj_polyline(points: &[Point3]) -> String {
    let mut s = String::new();
    for p in points {
        let _ = writeln!(s, "v {} {} {}", p.x, p.y, p.z);
    }
    s.push('l');
    for i in 0..points.len() {
        let _ = write!(s, " {}", i + 1);
    }
    s.push_str(" 1\n");
    s
}

pub fn ply_bytes(mesh: &TriMesh) -> Vec<u8> {
    let normals = mesh.vertex_normals();
    let header = format!(
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\n\
         property float nx\nproperty float ny\nproperty float nz\nelement face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.positions.len(),
        mesh.triangles.len()
    );
    let mut out = Vec::with_capacity(header.len() + mesh.positions.len() * 24 + mesh.triangles.len() * 13);
    out.extend_from_slice(header.as_bytes());
    for (p, n) in mesh.positions.iter().zip(&normals) {
        for c in [p.x, p.y, p.z, n.x, n.y, n.z] {
            out.extend_from_slice(&(c as f32).to_le_bytes());
        }
    }
    for t in &mesh.triangles {
        out.push(3);
        for &i in t {
            out.extend_from_slice(&(i as i32).to_le_bytes());
        }
    }
    out
}

pub fn write_mesh(mesh: &TriMesh, format: MeshFormat, path: &Path) -> Result<()> {
    let bytes = match format {
        MeshFormat::Obj => obj_string(mesh).into_bytes(),
        MeshFormat::Ply => ply_bytes(mesh),
    };
    let mut f = fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

fn bad(m: impl Into<String>) -> Error {
    Error::Config(m.into())
}

pub fn parse_obj(text: &str) -> Result<TriMesh> {
    let mut pos = Vec::new();
    let mut tris = Vec::new();
    for line in text.lines() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it.map(|x| x.parse().map_err(|_| bad(format!("bad vertex: {line}")))).collect::<Result<_>>()?;
                if c.len() < 3 {
                    return Err(bad(format!("bad vertex: {line}")));
                }
                pos.push(Point3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx: Vec<u32> = it
                    .map(|w| {
                        let i: u32 = w.split('/').next().unwrap_or("").parse().map_err(|_| bad(format!("bad face: {line}")))?;
                        i.checked_sub(1).ok_or_else(|| bad(format!("bad face: {line}")))
                    })
                    .collect::<Result<_>>()?;
                if idx.len() != 3 {
                    return Err(bad(format!("non-triangular face: {line}")));
                }
                tris.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    Ok(TriMesh::new(pos, tris))
}

pub fn parse_ply(bytes: &[u8]) -> Result<TriMesh> {
    const END: &[u8] = b"end_header\n";
    let end = bytes.windows(END.len()).position(|w| w == END).ok_or_else(|| bad("PLY header not terminated"))? + END.len();
    let header = std::str::from_utf8(&bytes[..end]).map_err(|_| bad("PLY header is not text"))?;
    let mut nv = 0usize;
    let mut nf = 0usize;
    let mut props = 0usize;
    for line in header.lines() {
        let w: Vec<&str> = line.split_whitespace().collect();
        match w.as_slice() {
            ["format", f, _] if *f != "binary_little_endian" => return Err(bad("only binary little-endian PLY is supported")),
            ["element", "vertex", n] => nv = n.parse().map_err(|_| bad("bad vertex count"))?,
            ["element", "face", n] => nf = n.parse().map_err(|_| bad("bad face count"))?,
            ["property", "float", _] => props += 1,
            _ => {}
        }
    }
    let mut at = end;
    let f32_at = |at: &mut usize| -> Result<f32> {
        let b = bytes.get(*at..*at + 4).ok_or_else(|| bad("PLY truncated"))?;
        *at += 4;
        Ok(f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    };
    let mut pos = Vec::with_capacity(nv);
    for _ in 0..nv {
        let mut c = [0.0f64; 3];
        for v in &mut c {
            *v = f32_at(&mut at)? as f64;
        }
        for _ in 3..props {
            f32_at(&mut at)?;
        }
        pos.push(Point3::new(c[0], c[1], c[2]));
    }
    let mut tris = Vec::with_capacity(nf);
    for _ in 0..nf {
        if bytes.get(at) != Some(&3) {
            return Err(bad("non-triangular PLY face"));
        }
        at += 1;
        let mut t = [0u32; 3];
        for v in &mut t {
            let b = bytes.get(at..at + 4).ok_or_else(|| bad("PLY truncated"))?;
            *v = i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as u32;
            at += 4;
        }
        tris.push(t);
    }
    Ok(TriMesh::new(pos, tris))
}

pub fn read_mesh(path: &Path) -> Result<TriMesh> {
    match MeshFormat::from_path(path) {
        Some(MeshFormat::Obj) => parse_obj(&fs::read_to_string(path)?),
        Some(MeshFormat::Ply) => parse_ply(&fs::read(path)?),
        None => Err(bad(format!("unknown mesh format: {}", path.display()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::SphereGrid;

    fn sphere() -> TriMesh {
        SphereGrid::new(8, 12).mesh(|u, v| {
            let a = std::f64::consts::PI * u;
            Point3::new(a.sin() * v.cos(), a.sin() * v.sin(), a.cos())
        })
    }

    #[test]
    fn obj_round_trip() {
        let m = sphere();
        let back = parse_obj(&obj_string(&m)).unwrap();
        assert_eq!(back.triangles, m.triangles);
        for (a, b) in back.positions.iter().zip(&m.positions) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn ply_round_trip_at_f32() {
        let m = sphere();
        let back = parse_ply(&ply_bytes(&m)).unwrap();
        assert_eq!(back.triangles, m.triangles);
        for (a, b) in back.positions.iter().zip(&m.positions) {
            assert_eq!(a.x, b.x as f32 as f64);
            assert_eq!(a.z, b.z as f32 as f64);
        }
    }

    #[test]
    fn polyline_closes() {
        let s = obj_polyline(&[Point3::ZERO, Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)]);
        assert!(s.ends_with("l 1 2 3 1\n"));
    }
}
