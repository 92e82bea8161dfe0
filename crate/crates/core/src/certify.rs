//! Numerical certificates: immersion, embedding, linking, Hausdorff
//! distance, double covers and temporal continuity.

use crate::donut::windings;
use crate::error::{Error, Result};
use crate::geom::{sigma_min, Differential3x2, Point3, SampledCurve};
use crate::intersect::{self_intersections, IntersectTolerances};
use crate::mesh::TriMesh;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

/// Minimum σ over parameter samples and its location.
pub fn immersion_check<F>(params: &[(f64, f64)], diff: F) -> (f64, (f64, f64))
where
    F: Fn(f64, f64) -> Differential3x2 + Sync,
{
    params
        .par_iter()
        .map(|&(u, v)| (sigma_min(&diff(u, v)), (u, v)))
        .reduce(|| (f64::INFINITY, (f64::NAN, f64::NAN)), |a, b| if b.0 < a.0 { b } else { a })
}

pub fn require_immersed<F>(params: &[(f64, f64)], diff: F, floor: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Differential3x2 + Sync,
{
    let (s, at) = immersion_check(params, diff);
    if s.is_nan() || s < floor {
        return Err(Error::Immersion { sigma: s, floor, location: format!("(u, v) = ({:.4}, {:.4})", at.0, at.1) });
    }
    Ok(s)
}

pub fn is_embedded(mesh: &TriMesh, tol: &IntersectTolerances) -> bool {
    self_intersections(mesh, tol).is_empty()
}

/// Solid angle subtended by segment pair (p1,p2), (p3,p4), signed.
fn segment_pair_linking(p1: Point3, p2: Point3, p3: Point3, p4: Point3) -> f64 {
    let r13 = p3 - p1;
    let r14 = p4 - p1;
    let r23 = p3 - p2;
    let r24 = p4 - p2;
    let unit = |v: Point3| {
        let n = v.norm();
        if n > 1e-300 {
            v / n
        } else {
            Point3::ZERO
        }
    };
    let n1 = unit(r13.cross(r14));
    let n2 = unit(r14.cross(r24));
    let n3 = unit(r24.cross(r23));
    let n4 = unit(r23.cross(r13));
    let a = |x: f64| x.clamp(-1.0, 1.0).asin();
    let omega = a(n1.dot(n2)) + a(n2.dot(n3)) + a(n3.dot(n4)) + a(n4.dot(n1));
    let s = (p4 - p3).cross(p2 - p1).dot(r13);
    omega * s.signum()
}

/// Gauss linking number of two closed polygons by exact segment solid
/// angles. Fails when the curves come closer than 1e-12.
pub fn gauss_linking(a: &SampledCurve, b: &SampledCurve) -> Result<f64> {
    let sa: Vec<(Point3, Point3)> = a.segments().collect();
    let sb: Vec<(Point3, Point3)> = b.segments().collect();
    let min_d = a
        .points
        .par_iter()
        .map(|p| b.points.iter().map(|q| p.dist(*q)).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min);
    if min_d < 1e-12 {
        return Err(Error::CurvesIntersect(min_d));
    }
    let total: f64 = sa
        .par_iter()
        .map(|&(p1, p2)| sb.iter().map(|&(p3, p4)| segment_pair_linking(p1, p2, p3, p4)).sum::<f64>())
        .sum();
    Ok(total / (4.0 * PI))
}

/// (longitudinal, meridional) windings about the boundary torus.
pub fn torus_windings(c: &SampledCurve) -> (f64, f64) {
    windings(c)
}

/// Closest point on triangle `t` to `p`.
pub fn closest_on_triangle(p: Point3, t: &[Point3; 3]) -> Point3 {
    let [a, b, c] = *t;
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let den = 1.0 / (va + vb + vc);
    a + ab * (vb * den) + ac * (vc * den)
}

/// Uniform-grid index of a mesh's triangles for nearest queries.
pub struct TriangleLocator<'a> {
    mesh: &'a TriMesh,
    cell: f64,
    origin: Point3,
    cells: HashMap<(i64, i64, i64), Vec<u32>>,
}

impl<'a> TriangleLocator<'a> {
    pub fn new(mesh: &'a TriMesh) -> Self {
        let mut diag: Vec<f64> = (0..mesh.triangles.len())
            .map(|k| {
                let t = mesh.tri(k);
                t[0].dist(t[1]).max(t[1].dist(t[2])).max(t[2].dist(t[0]))
            })
            .collect();
        diag.sort_by(f64::total_cmp);
        let cell = diag.get(diag.len() / 2).copied().unwrap_or(1.0).max(1e-9) * 2.0;
        let origin = mesh.bounding_box().0;
        let mut cells: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
        let key = |p: Point3| {
            (
                ((p.x - origin.x) / cell).floor() as i64,
                ((p.y - origin.y) / cell).floor() as i64,
                ((p.z - origin.z) / cell).floor() as i64,
            )
        };
        for k in 0..mesh.triangles.len() {
            let t = mesh.tri(k);
            let lo = Point3::new(t[0].x.min(t[1].x).min(t[2].x), t[0].y.min(t[1].y).min(t[2].y), t[0].z.min(t[1].z).min(t[2].z));
            let hi = Point3::new(t[0].x.max(t[1].x).max(t[2].x), t[0].y.max(t[1].y).max(t[2].y), t[0].z.max(t[1].z).max(t[2].z));
            let (a, b) = (key(lo), key(hi));
            for i in a.0..=b.0 {
                for j in a.1..=b.1 {
                    for l in a.2..=b.2 {
                        cells.entry((i, j, l)).or_default().push(k as u32);
                    }
                }
            }
        }
        TriangleLocator { mesh, cell, origin, cells }
    }

    fn key(&self, p: Point3) -> (i64, i64, i64) {
        (
            ((p.x - self.origin.x) / self.cell).floor() as i64,
            ((p.y - self.origin.y) / self.cell).floor() as i64,
            ((p.z - self.origin.z) / self.cell).floor() as i64,
        )
    }

    /// Nearest triangle index and distance.
    pub fn nearest(&self, p: Point3) -> (u32, f64) {
        let c = self.key(p);
        let mut best = (u32::MAX, f64::INFINITY);
        let max_ring = 1 + self.cells.len().max(1) as i64;
        for ring in 0..max_ring {
            for i in -ring..=ring {
                for j in -ring..=ring {
                    for l in -ring..=ring {
                        if i.abs().max(j.abs()).max(l.abs()) != ring {
                            continue;
                        }
                        if let Some(list) = self.cells.get(&(c.0 + i, c.1 + j, c.2 + l)) {
                            for &k in list {
                                let d = closest_on_triangle(p, &self.mesh.tri(k as usize)).dist(p);
                                if d < best.1 {
                                    best = (k, d);
                                }
                            }
                        }
                    }
                }
            }
            if best.1 <= ring as f64 * self.cell {
                break;
            }
        }
        best
    }

    /// All triangles within `r` of `p`.
    pub fn within(&self, p: Point3, r: f64) -> Vec<u32> {
        let lo = self.key(p - Point3::new(r, r, r));
        let hi = self.key(p + Point3::new(r, r, r));
        let mut out = Vec::new();
        for i in lo.0..=hi.0 {
            for j in lo.1..=hi.1 {
                for l in lo.2..=hi.2 {
                    if let Some(list) = self.cells.get(&(i, j, l)) {
                        for &k in list {
                            if closest_on_triangle(p, &self.mesh.tri(k as usize)).dist(p) <= r {
                                out.push(k);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Largest distance from a vertex of `a` to the surface `b`.
pub fn one_sided_hausdorff(a: &TriMesh, b: &TriMesh) -> f64 {
    let loc = TriangleLocator::new(b);
    a.positions.par_iter().map(|&p| loc.nearest(p).1).reduce(|| 0.0, f64::max)
}

pub fn hausdorff(a: &TriMesh, b: &TriMesh) -> f64 {
    one_sided_hausdorff(a, b).max(one_sided_hausdorff(b, a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EversionCertificate {
    pub hausdorff: f64,
    /// Mean over final vertices of n_final · n_initial at the nearest
    /// initial triangle.
    pub mean_normal_dot: f64,
    pub passed: bool,
}

/// Compares the final frame with the initial one: same image, opposite
/// normals.
pub fn eversion_certificate(initial: &TriMesh, last: &TriMesh, max_hausdorff: f64, max_normal_dot: f64) -> EversionCertificate {
    let h = hausdorff(initial, last);
    let loc = TriangleLocator::new(initial);
    let normals = last.vertex_normals();
    let sum: f64 = last
        .positions
        .par_iter()
        .zip(normals.par_iter())
        .map(|(&p, &n)| {
            let (k, _) = loc.nearest(p);
            n.dot(initial.face_normal(k as usize).normalized())
        })
        .sum();
    let mean = sum / last.positions.len() as f64;
    EversionCertificate { hausdorff: h, mean_normal_dot: mean, passed: h < max_hausdorff && mean <= max_normal_dot }
}

fn root(p: &mut [usize], mut i: usize) -> usize {
    while p[i] != i {
        p[i] = p[p[i]];
        i = p[i];
    }
    i
}

/// Counts distinct sheets of a mesh near a point.
///
/// Triangles within the search radius are grouped when they share a
/// vertex or lie within `hops` edges of each other in the mesh graph, so
/// sliver triangles of one sheet are not mistaken for another sheet.
pub struct SheetCounter<'a> {
    mesh: &'a TriMesh,
    loc: TriangleLocator<'a>,
    neighbors: Vec<Vec<u32>>,
    mask: &'a [bool],
    pub hops: usize,
}

impl<'a> SheetCounter<'a> {
    pub fn new(mesh: &'a TriMesh, mask: &'a [bool], hops: usize) -> Self {
        SheetCounter { mesh, loc: TriangleLocator::new(mesh), neighbors: mesh.vertex_neighbors(), mask, hops }
    }

    fn ball(&self, start: &[u32]) -> HashSet<u32> {
        let mut seen: HashSet<u32> = start.iter().copied().collect();
        let mut front: Vec<u32> = start.to_vec();
        for _ in 0..self.hops {
            let mut next = Vec::new();
            for v in front {
                for &w in &self.neighbors[v as usize] {
                    if seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            front = next;
        }
        seen
    }

    /// Number of sheets of the masked triangles passing within `tol` of `p`.
    pub fn count(&self, p: Point3, tol: f64) -> usize {
        let found: Vec<u32> = self.loc.within(p, tol).into_iter().filter(|&k| self.mask[k as usize]).collect();
        let mut parent: Vec<usize> = (0..found.len()).collect();
        let mut owner: HashMap<u32, usize> = HashMap::new();
        for (i, &k) in found.iter().enumerate() {
            for &v in &self.mesh.triangles[k as usize] {
                match owner.get(&v) {
                    Some(&j) => {
                        let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                        parent[a] = b;
                    }
                    None => {
                        owner.insert(v, i);
                    }
                }
            }
        }
        if self.hops > 0 {
            let mut groups: HashMap<usize, Vec<u32>> = HashMap::new();
            for (&v, &i) in &owner {
                groups.entry(root(&mut parent, i)).or_default().push(v);
            }
            let mut keys: Vec<usize> = groups.keys().copied().collect();
            keys.sort_unstable();
            for (n, &a) in keys.iter().enumerate() {
                let reach = self.ball(&groups[&a]);
                for &b in &keys[n + 1..] {
                    if groups[&b].iter().any(|v| reach.contains(v)) {
                        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                        parent[ra] = rb;
                    }
                }
            }
        }
        (0..found.len()).filter(|&i| root(&mut parent, i) == i).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleCoverReport {
    pub samples: usize,
    pub two_sheeted: usize,
    pub fraction: f64,
}

const SHEET_HOPS: usize = 4;

/// Fraction of `samples` covered by exactly two sheets of the masked part
/// of `mesh`.
pub fn double_cover_check(mesh: &TriMesh, mask: &[bool], samples: &[Point3], tol: f64) -> DoubleCoverReport {
    let counter = SheetCounter::new(mesh, mask, SHEET_HOPS);
    let two = samples.par_iter().filter(|&&p| counter.count(p, tol) == 2).count();
    DoubleCoverReport { samples: samples.len(), two_sheeted: two, fraction: two as f64 / samples.len().max(1) as f64 }
}

/// max |F(t_{k+1}) − F(t_k)| / Δt over consecutive frames.
pub fn temporal_continuity(frames: &[(f64, &[Point3])]) -> f64 {
    frames
        .windows(2)
        .map(|w| {
            let dt = w[1].0 - w[0].0;
            let d = w[0].1.iter().zip(w[1].1).map(|(a, b)| a.dist(*b)).fold(0.0, f64::max);
            if dt > 0.0 {
                d / dt
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

/// One named check with its measured value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Certificate {
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn push(&mut self, name: &str, value: f64, passed: bool) {
        self.checks.push(Check { name: name.to_string(), value, passed });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::SphereGrid;
    use std::f64::consts::TAU;

    fn circle(c: Point3, r: f64, plane_xz: bool, n: usize) -> SampledCurve {
        SampledCurve::sample(
            |t| if plane_xz { c + Point3::new(r * t.cos(), 0.0, r * t.sin()) } else { c + Point3::new(r * t.cos(), r * t.sin(), 0.0) },
            0.0,
            TAU,
            n,
            true,
        )
    }

    #[test]
    fn hopf_link_has_linking_one() {
        let a = circle(Point3::ZERO, 1.0, false, 200);
        let b = circle(Point3::new(1.0, 0.0, 0.0), 1.0, true, 200);
        let lk = gauss_linking(&a, &b).unwrap();
        assert!((lk.abs() - 1.0).abs() < 1e-9);
        let far = circle(Point3::new(5.0, 0.0, 0.0), 1.0, true, 200);
        assert!(gauss_linking(&a, &far).unwrap().abs() < 1e-9);
    }

    #[test]
    fn closest_point_inside_and_at_vertex() {
        let t = [Point3::ZERO, Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)];
        let q = closest_on_triangle(Point3::new(0.2, 0.2, 3.0), &t);
        assert!(q.dist(Point3::new(0.2, 0.2, 0.0)) < 1e-15);
        assert_eq!(closest_on_triangle(Point3::new(-1.0, -1.0, 0.0), &t), Point3::ZERO);
    }

    fn sphere(r: f64) -> TriMesh {
        SphereGrid::new(24, 48).mesh(|u, v| {
            let a = PI * u;
            Point3::new(r * a.sin() * v.cos(), r * a.sin() * v.sin(), r * a.cos())
        })
    }

    #[test]
    fn hausdorff_of_concentric_spheres() {
        let h = hausdorff(&sphere(1.0), &sphere(1.5));
        assert!((h - 0.5).abs() < 0.02);
        assert_eq!(hausdorff(&sphere(1.0), &sphere(1.0)), 0.0);
    }

    #[test]
    fn flipped_sphere_is_everted() {
        let s = sphere(1.0);
        let c = eversion_certificate(&s, &s.flipped(), 1e-3, -0.99);
        assert!(c.passed);
        let same = eversion_certificate(&s, &s, 1e-3, -0.99);
        assert!(!same.passed);
    }

    #[test]
    fn sheet_counting() {
        let a = sphere(1.0);
        let mut m = a.clone();
        let off = m.positions.len() as u32;
        m.positions.extend(a.positions.iter().copied());
        m.triangles.extend(a.triangles.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
        let mask = vec![true; m.triangles.len()];
        for hops in [0, 4] {
            assert_eq!(SheetCounter::new(&m, &mask, hops).count(a.positions[100], 1e-3), 2);
            let all = vec![true; a.triangles.len()];
            assert_eq!(SheetCounter::new(&a, &all, hops).count(a.positions[100], 1e-3), 1);
        }
    }
}
