//! Triangle meshes over polar parameter grids.
//!
//! Spheres are sampled as two pole vertices plus `nu − 1` rings of `nv`
//! vertices; discs as a centre vertex plus `nr` rings. Vertex order follows
//! the parameter grid so exports are deterministic.

use crate::geom::Point3;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub positions: Vec<Point3>,
    pub triangles: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn new(positions: Vec<Point3>, triangles: Vec<[u32; 3]>) -> Self {
        TriMesh { positions, triangles }
    }

    pub fn tri(&self, k: usize) -> [Point3; 3] {
        let t = self.triangles[k];
        [self.positions[t[0] as usize], self.positions[t[1] as usize], self.positions[t[2] as usize]]
    }

    pub fn edge_count(&self) -> usize {
        let mut edges = HashSet::new();
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.positions.len() as i64 - self.edge_count() as i64 + self.triangles.len() as i64
    }

    /// Unnormalized face normal (twice the area vector).
    pub fn face_normal(&self, k: usize) -> Point3 {
        let [a, b, c] = self.tri(k);
        (b - a).cross(c - a)
    }

    /// Area-weighted unit vertex normals.
    pub fn vertex_normals(&self) -> Vec<Point3> {
        let mut n = vec![Point3::ZERO; self.positions.len()];
        for (k, t) in self.triangles.iter().enumerate() {
            let f = self.face_normal(k);
            for &i in t {
                n[i as usize] += f;
            }
        }
        n.into_iter().map(|v| v.normalized()).collect()
    }

    /// Signed enclosed volume; positive when faces are oriented outward.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let a = self.positions[t[0] as usize];
                let b = self.positions[t[1] as usize];
                let c = self.positions[t[2] as usize];
                a.dot(b.cross(c)) / 6.0
            })
            .sum()
    }

    pub fn flipped(&self) -> TriMesh {
        TriMesh {
            positions: self.positions.clone(),
            triangles: self.triangles.iter().map(|t| [t[0], t[2], t[1]]).collect(),
        }
    }

    pub fn bounding_box(&self) -> (Point3, Point3) {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for p in &self.positions {
            lo = Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        (lo, hi)
    }

    /// Vertex adjacency lists.
    pub fn vertex_neighbors(&self) -> Vec<Vec<u32>> {
        let mut nb: Vec<Vec<u32>> = vec![Vec::new(); self.positions.len()];
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                nb[a as usize].push(b);
                nb[b as usize].push(a);
            }
        }
        for l in &mut nb {
            l.sort_unstable();
            l.dedup();
        }
        nb
    }
}

/// Polar sphere grid: `nu` intervals from pole to pole, `nv` columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereGrid {
    pub nu: usize,
    pub nv: usize,
}

impl SphereGrid {
    pub fn new(nu: usize, nv: usize) -> Self {
        assert!(nu >= 2 && nv >= 3);
        SphereGrid { nu, nv }
    }

    pub fn vertex_count(&self) -> usize {
        2 + (self.nu - 1) * self.nv
    }

    /// Parameters (u, v) of every vertex in storage order.
    pub fn params(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.vertex_count());
        out.push((0.0, 0.0));
        for i in 1..self.nu {
            let u = i as f64 / self.nu as f64;
            for j in 0..self.nv {
                out.push((u, TAU * j as f64 / self.nv as f64));
            }
        }
        out.push((1.0, 0.0));
        out
    }

    pub fn ring_index(&self, i: usize, j: usize) -> u32 {
        debug_assert!(i >= 1 && i < self.nu);
        (1 + (i - 1) * self.nv + j % self.nv) as u32
    }

    pub fn south_index(&self) -> u32 {
        (self.vertex_count() - 1) as u32
    }

    pub fn triangles(&self) -> Vec<[u32; 3]> {
        let (nu, nv) = (self.nu, self.nv);
        let mut t = Vec::with_capacity(2 * nv * (nu - 1));
        for j in 0..nv {
            t.push([0, self.ring_index(1, j), self.ring_index(1, j + 1)]);
        }
        for i in 1..nu - 1 {
            for j in 0..nv {
                let a = self.ring_index(i, j);
                let b = self.ring_index(i + 1, j);
                let c = self.ring_index(i + 1, j + 1);
                let d = self.ring_index(i, j + 1);
                t.push([a, b, c]);
                t.push([a, c, d]);
            }
        }
        let s = self.south_index();
        for j in 0..nv {
            t.push([self.ring_index(nu - 1, j), s, self.ring_index(nu - 1, j + 1)]);
        }
        t
    }

    pub fn mesh<F: Fn(f64, f64) -> Point3>(&self, f: F) -> TriMesh {
        TriMesh::new(self.params().into_iter().map(|(u, v)| f(u, v)).collect(), self.triangles())
    }
}

/// Polar disc grid: centre vertex and `nr` rings out to `rho_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscGrid {
    pub nr: usize,
    pub nv: usize,
    pub rho_max: f64,
}

impl DiscGrid {
    pub fn new(nr: usize, nv: usize) -> Self {
        DiscGrid { nr, nv, rho_max: 1.0 }
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.nr * self.nv
    }

    pub fn params(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.vertex_count());
        out.push((0.0, 0.0));
        for i in 1..=self.nr {
            let r = self.rho_max * i as f64 / self.nr as f64;
            for j in 0..self.nv {
                out.push((r, TAU * j as f64 / self.nv as f64));
            }
        }
        out
    }

    pub fn ring_index(&self, i: usize, j: usize) -> u32 {
        (1 + (i - 1) * self.nv + j % self.nv) as u32
    }

    /// Indices of the outermost ring in angular order.
    pub fn boundary(&self) -> Vec<u32> {
        (0..self.nv).map(|j| self.ring_index(self.nr, j)).collect()
    }

    pub fn triangles(&self) -> Vec<[u32; 3]> {
        let nv = self.nv;
        let mut t = Vec::new();
        for j in 0..nv {
            t.push([0, self.ring_index(1, j), self.ring_index(1, j + 1)]);
        }
        for i in 1..self.nr {
            for j in 0..nv {
                let a = self.ring_index(i, j);
                let b = self.ring_index(i + 1, j);
                let c = self.ring_index(i + 1, j + 1);
                let d = self.ring_index(i, j + 1);
                t.push([a, b, c]);
                t.push([a, c, d]);
            }
        }
        t
    }

    pub fn mesh<F: Fn(f64, f64) -> Point3>(&self, f: F) -> TriMesh {
        TriMesh::new(self.params().into_iter().map(|(r, v)| f(r, v)).collect(), self.triangles())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round(u: f64, v: f64) -> Point3 {
        let a = std::f64::consts::PI * u;
        Point3::new(a.sin() * v.cos(), a.sin() * v.sin(), a.cos())
    }

    #[test]
    fn sphere_grid_is_a_sphere() {
        let m = SphereGrid::new(16, 24).mesh(round);
        assert_eq!(m.euler_characteristic(), 2);
        assert!(m.signed_volume().abs() > 3.0);
    }

    #[test]
    fn disc_grid_is_a_disc() {
        let g = DiscGrid::new(5, 12);
        let m = g.mesh(|r, v| Point3::new(r * v.cos(), r * v.sin(), 0.0));
        assert_eq!(m.euler_characteristic(), 1);
        assert_eq!(g.boundary().len(), 12);
    }

    #[test]
    fn flipping_negates_volume() {
        let m = SphereGrid::new(8, 12).mesh(round);
        assert!((m.signed_volume() + m.flipped().signed_volume()).abs() < 1e-12);
    }
}
