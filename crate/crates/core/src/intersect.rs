//! Self-intersection inventory of a triangle mesh: triangle pairs found
//! through a uniform grid, intersection segments chained into curves, and
//! triple points where three sheets meet.

use crate::geom::Point3;
use crate::mesh::TriMesh;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectTolerances {
    /// Plane-side threshold relative to the triangle size.
    pub coincidence: f64,
    /// Endpoint gluing distance when chaining segments.
    pub chaining: f64,
    /// Graph distance (in vertices) below which triangle pairs are skipped.
    pub exclusion_ring: usize,
}

impl Default for IntersectTolerances {
    fn default() -> Self {
        IntersectTolerances { coincidence: 1e-9, chaining: 1e-6, exclusion_ring: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point3,
    pub b: Point3,
    pub tris: (u32, u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleCurve {
    pub segments: Vec<usize>,
    pub length: f64,
    /// Number of free segment ends; 0 for a closed loop, 2 for an arc.
    pub open_ends: usize,
    pub points: Vec<Point3>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionInventory {
    pub segments: Vec<Segment>,
    pub curves: Vec<DoubleCurve>,
    pub triple_points: Vec<Point3>,
}

impl IntersectionInventory {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn curve_count(&self) -> usize {
        self.curves.len()
    }
}

fn sub_bounds(t: &[Point3; 3]) -> (Point3, Point3) {
    let lo = Point3::new(
        t[0].x.min(t[1].x).min(t[2].x),
        t[0].y.min(t[1].y).min(t[2].y),
        t[0].z.min(t[1].z).min(t[2].z),
    );
    let hi = Point3::new(
        t[0].x.max(t[1].x).max(t[2].x),
        t[0].y.max(t[1].y).max(t[2].y),
        t[0].z.max(t[1].z).max(t[2].z),
    );
    (lo, hi)
}

/// Intersection segment of two triangles, or `None` when disjoint or
/// (nearly) coplanar.
pub fn tri_tri_segment(a: &[Point3; 3], b: &[Point3; 3], eps: f64) -> Option<(Point3, Point3)> {
    let nb = (b[1] - b[0]).cross(b[2] - b[0]);
    let na = (a[1] - a[0]).cross(a[2] - a[0]);
    let la = na.norm();
    let lb = nb.norm();
    if la == 0.0 || lb == 0.0 {
        return None;
    }
    let (na, nb) = (na / la, nb / lb);
    let sa: [f64; 3] = std::array::from_fn(|i| (a[i] - b[0]).dot(nb));
    let sb: [f64; 3] = std::array::from_fn(|i| (b[i] - a[0]).dot(na));
    let scale = la.sqrt().max(lb.sqrt());
    let e = eps * scale;
    if sa.iter().all(|&s| s > e) || sa.iter().all(|&s| s < -e) {
        return None;
    }
    if sb.iter().all(|&s| s > e) || sb.iter().all(|&s| s < -e) {
        return None;
    }
    if sa.iter().all(|&s| s.abs() <= e) || sb.iter().all(|&s| s.abs() <= e) {
        return None;
    }
    let d = na.cross(nb);
    if d.norm() < 1e-9 {
        return None;
    }
    let ca = clip(a, &sa, e)?;
    let cb = clip(b, &sb, e)?;
    let order = |p: (Point3, Point3)| {
        let (u, v) = (p.0.dot(d), p.1.dot(d));
        if u <= v {
            (p.0, p.1, u, v)
        } else {
            (p.1, p.0, v, u)
        }
    };
    let (a0, a1, ta0, ta1) = order(ca);
    let (b0, b1, tb0, tb1) = order(cb);
    let (lo, plo) = if ta0 >= tb0 { (ta0, a0) } else { (tb0, b0) };
    let (hi, phi) = if ta1 <= tb1 { (ta1, a1) } else { (tb1, b1) };
    if lo > hi {
        return None;
    }
    Some((plo, phi))
}

/// Chord of a triangle cut by the other triangle's plane.
fn clip(t: &[Point3; 3], s: &[f64; 3], e: f64) -> Option<(Point3, Point3)> {
    let mut pts: Vec<Point3> = Vec::with_capacity(3);
    for i in 0..3 {
        let j = (i + 1) % 3;
        if s[i].abs() <= e {
            pts.push(t[i]);
        }
        if (s[i] > e && s[j] < -e) || (s[i] < -e && s[j] > e) {
            // fixed edge orientation so shared edges give identical points
            let (p, q, sp, sq) = if i < j { (t[i], t[j], s[i], s[j]) } else { (t[j], t[i], s[j], s[i]) };
            let u = sp / (sp - sq);
            pts.push(p + (q - p) * u);
        }
    }
    match pts.len() {
        0 | 1 => None,
        _ => Some((pts[0], pts[1])),
    }
}

/// Segment–triangle crossing point.
fn segment_triangle(p: Point3, q: Point3, t: &[Point3; 3]) -> Option<Point3> {
    let n = (t[1] - t[0]).cross(t[2] - t[0]);
    let dp = (p - t[0]).dot(n);
    let dq = (q - t[0]).dot(n);
    if (dp > 0.0 && dq > 0.0) || (dp < 0.0 && dq < 0.0) || dp == dq {
        return None;
    }
    let x = p + (q - p) * (dp / (dp - dq));
    for i in 0..3 {
        let j = (i + 1) % 3;
        if (t[j] - t[i]).cross(x - t[i]).dot(n) < 0.0 {
            return None;
        }
    }
    Some(x)
}

struct Grid {
    cell: f64,
    origin: Point3,
    cells: HashMap<(i64, i64, i64), Vec<u32>>,
}

impl Grid {
    fn key(&self, p: Point3) -> (i64, i64, i64) {
        let q = (p - self.origin) / self.cell;
        (q.x.floor() as i64, q.y.floor() as i64, q.z.floor() as i64)
    }

    fn build(mesh: &TriMesh) -> Grid {
        let mut sizes: Vec<f64> = (0..mesh.triangles.len())
            .map(|k| {
                let (lo, hi) = sub_bounds(&mesh.tri(k));
                (hi - lo).norm()
            })
            .collect();
        sizes.sort_by(|a, b| a.total_cmp(b));
        let cell = (sizes.get(sizes.len() / 2).copied().unwrap_or(1.0) * 2.0).max(1e-12);
        let (origin, _) = mesh.bounding_box();
        let mut g = Grid { cell, origin, cells: HashMap::new() };
        for k in 0..mesh.triangles.len() {
            let (lo, hi) = sub_bounds(&mesh.tri(k));
            let (a, b) = (g.key(lo), g.key(hi));
            for i in a.0..=b.0 {
                for j in a.1..=b.1 {
                    for l in a.2..=b.2 {
                        g.cells.entry((i, j, l)).or_default().push(k as u32);
                    }
                }
            }
        }
        g
    }
}

/// Vertices within `ring` edges of each triangle's vertices.
fn near_vertices(mesh: &TriMesh, ring: usize) -> Vec<Vec<u32>> {
    let nb = mesh.vertex_neighbors();
    mesh.triangles
        .par_iter()
        .map(|t| {
            let mut set: Vec<u32> = t.to_vec();
            let mut frontier = set.clone();
            for _ in 1..ring {
                let mut next = Vec::new();
                for &v in &frontier {
                    next.extend_from_slice(&nb[v as usize]);
                }
                next.sort_unstable();
                next.dedup();
                frontier = next.clone();
                set.extend(next);
            }
            set.sort_unstable();
            set.dedup();
            set
        })
        .collect()
}

pub fn self_intersections(mesh: &TriMesh, tol: &IntersectTolerances) -> IntersectionInventory {
    let grid = Grid::build(mesh);
    let near = near_vertices(mesh, tol.exclusion_ring.max(1));
    let n = mesh.triangles.len();
    let mut segments: Vec<Segment> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let ti = mesh.tri(i);
            let (lo, hi) = sub_bounds(&ti);
            let (a, b) = (grid.key(lo), grid.key(hi));
            let mut cand: Vec<u32> = Vec::new();
            for x in a.0..=b.0 {
                for y in a.1..=b.1 {
                    for z in a.2..=b.2 {
                        if let Some(l) = grid.cells.get(&(x, y, z)) {
                            cand.extend(l.iter().copied().filter(|&j| (j as usize) > i));
                        }
                    }
                }
            }
            cand.sort_unstable();
            cand.dedup();
            let mut out = Vec::new();
            for j in cand {
                let tj = mesh.triangles[j as usize];
                if tj.iter().any(|v| near[i].binary_search(v).is_ok()) {
                    continue;
                }
                let pj = mesh.tri(j as usize);
                let (lo2, hi2) = sub_bounds(&pj);
                if lo2.x > hi.x || lo2.y > hi.y || lo2.z > hi.z || lo.x > hi2.x || lo.y > hi2.y || lo.z > hi2.z {
                    continue;
                }
                if let Some((p, q)) = tri_tri_segment(&ti, &pj, tol.coincidence) {
                    out.push(Segment { a: p, b: q, tris: (i as u32, j) });
                }
            }
            out
        })
        .collect();
    segments.sort_by_key(|s| s.tris);
    let curves = chain(&segments, tol.chaining);
    let triple_points = triples(mesh, &segments, tol.chaining);
    IntersectionInventory { segments, curves, triple_points }
}

fn find(p: &mut [usize], mut i: usize) -> usize {
    while p[i] != i {
        p[i] = p[p[i]];
        i = p[i];
    }
    i
}

fn chain(segments: &[Segment], tol: f64) -> Vec<DoubleCurve> {
    let n = segments.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let cell = tol.max(1e-15);
    let key = |p: Point3| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64, (p.z / cell).floor() as i64);
    let mut buckets: HashMap<(i64, i64, i64), Vec<(usize, Point3)>> = HashMap::new();
    for (k, s) in segments.iter().enumerate() {
        for p in [s.a, s.b] {
            buckets.entry(key(p)).or_default().push((k, p));
        }
    }
    let mut degree = vec![[0usize; 2]; n];
    for (k, s) in segments.iter().enumerate() {
        for (e, p) in [s.a, s.b].into_iter().enumerate() {
            let c = key(p);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(l) = buckets.get(&(c.0 + dx, c.1 + dy, c.2 + dz)) {
                            for &(m, q) in l {
                                if m != k && p.dist(q) <= tol {
                                    degree[k][e] += 1;
                                    let (ra, rb) = (find(&mut parent, k), find(&mut parent, m));
                                    if ra != rb {
                                        parent[ra] = rb;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for k in 0..n {
        let r = find(&mut parent, k);
        groups.entry(r).or_default().push(k);
    }
    let mut curves: Vec<DoubleCurve> = groups
        .into_values()
        .map(|segs| {
            let length = segs.iter().map(|&k| segments[k].a.dist(segments[k].b)).sum();
            let open_ends = segs.iter().map(|&k| degree[k].iter().filter(|&&d| d == 0).count()).sum();
            let points = segs.iter().map(|&k| segments[k].a).collect();
            DoubleCurve { segments: segs, length, open_ends, points }
        })
        .collect();
    curves.sort_by(|a, b| b.length.total_cmp(&a.length));
    curves
}

fn triples(mesh: &TriMesh, segments: &[Segment], tol: f64) -> Vec<Point3> {
    let mut partners: HashMap<u32, Vec<(u32, usize)>> = HashMap::new();
    let mut pairs: HashSet<(u32, u32)> = HashSet::new();
    for (k, s) in segments.iter().enumerate() {
        partners.entry(s.tris.0).or_default().push((s.tris.1, k));
        partners.entry(s.tris.1).or_default().push((s.tris.0, k));
        pairs.insert(s.tris);
    }
    let mut found: Vec<Point3> = Vec::new();
    for list in partners.values() {
        for x in 0..list.len() {
            for y in x + 1..list.len() {
                let (b, kb) = list[x];
                let (c, _) = list[y];
                if b == c || !pairs.contains(&(b.min(c), b.max(c))) {
                    continue;
                }
                let s = &segments[kb];
                if let Some(p) = segment_triangle(s.a, s.b, &mesh.tri(c as usize)) {
                    if found.iter().all(|q| q.dist(p) > tol.max(1e-9) * 10.0) {
                        found.push(p);
                    }
                }
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::SphereGrid;

    fn t(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> [Point3; 3] {
        [Point3::new(a[0], a[1], a[2]), Point3::new(b[0], b[1], b[2]), Point3::new(c[0], c[1], c[2])]
    }

    #[test]
    fn crossing_triangles_meet_in_a_segment() {
        let a = t([-1.0, -1.0, 0.0], [2.0, -1.0, 0.0], [-1.0, 2.0, 0.0]);
        let b = t([0.0, 0.0, -1.0], [0.0, 0.5, 1.0], [0.5, 0.0, 1.0]);
        let (p, q) = tri_tri_segment(&a, &b, 1e-12).unwrap();
        assert!(p.z.abs() < 1e-12 && q.z.abs() < 1e-12);
        assert!(p.dist(q) > 0.1);
    }

    #[test]
    fn separated_triangles_do_not_meet() {
        let a = t([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let b = t([0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]);
        assert!(tri_tri_segment(&a, &b, 1e-12).is_none());
    }

    #[test]
    fn round_sphere_is_embedded() {
        let m = SphereGrid::new(24, 32).mesh(|u, v| {
            let a = std::f64::consts::PI * u;
            Point3::new(a.sin() * v.cos(), a.sin() * v.sin(), a.cos())
        });
        assert!(self_intersections(&m, &IntersectTolerances::default()).is_empty());
    }

    #[test]
    fn two_interpenetrating_spheres_give_one_loop() {
        let g = SphereGrid::new(24, 32);
        let s = |c: f64| {
            move |u: f64, v: f64| {
                let a = std::f64::consts::PI * u;
                Point3::new(c + a.sin() * v.cos(), a.sin() * v.sin(), a.cos())
            }
        };
        let m1 = g.mesh(s(0.0));
        let m2 = g.mesh(s(1.0));
        let off = m1.positions.len() as u32;
        let mut pos = m1.positions.clone();
        pos.extend(m2.positions);
        let mut tri = m1.triangles.clone();
        tri.extend(m2.triangles.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
        let inv = self_intersections(&TriMesh::new(pos, tri), &IntersectTolerances::default());
        assert_eq!(inv.curve_count(), 1);
        assert_eq!(inv.curves[0].open_ends, 0);
        assert!(inv.triple_points.is_empty());
    }

    #[test]
    fn three_planes_have_one_triple_point() {
        let mut pos = Vec::new();
        let mut tri = Vec::new();
        for axis in 0..3 {
            let o = pos.len() as u32;
            for (a, b) in [(-1.0, -1.0), (1.3, -1.0), (1.3, 1.1), (-1.0, 1.1)] {
                let c = [a, b];
                let p = match axis {
                    0 => Point3::new(0.0, c[0], c[1]),
                    1 => Point3::new(c[1], 0.0, c[0]),
                    _ => Point3::new(c[0], c[1], 0.0),
                };
                pos.push(p);
            }
            tri.push([o, o + 1, o + 2]);
            tri.push([o, o + 2, o + 3]);
        }
        let inv = self_intersections(&TriMesh::new(pos, tri), &IntersectTolerances::default());
        assert_eq!(inv.triple_points.len(), 1);
    }
}
