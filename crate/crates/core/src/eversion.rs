//! The five-stage eversion: inflate, align, spin, realign, deflate.
//!
//! The sphere domain is split into a north cap, an equatorial band and a
//! south cap. Caps carry copies of the disc, the band carries the collar
//! tube, then the annulus between the rotating discs.

use crate::certify::is_embedded;
use crate::disc::{smoothstep, DiscZero};
use crate::donut::{embed_local, foliation_arc};
use crate::error::{Error, Result};
use crate::geom::{rotate_z, sigma_min, Differential3x2, Point3};
use crate::intersect::IntersectTolerances;
use crate::mesh::{SphereGrid, TriMesh};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EversionSchedule {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub theta0: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// Profile radii where the thickening fades in.
    pub collar_inner: f64,
    pub collar_outer: f64,
}

impl Default for EversionSchedule {
    fn default() -> Self {
        EversionSchedule {
            t1: 0.15,
            t2: 0.3,
            t3: 0.7,
            t4: 0.85,
            theta0: PI / 12.0,
            delta: 0.08,
            epsilon: 0.05,
            collar_inner: 1.05,
            collar_outer: 1.3,
        }
    }
}

impl EversionSchedule {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(0.0 < self.t1 && self.t1 < self.t2 && self.t2 < self.t3 && self.t3 < self.t4 && self.t4 < 1.0) {
            return bad("stage boundaries must satisfy 0 < t1 < t2 < t3 < t4 < 1");
        }
        if !(self.theta0 > 0.0 && self.theta0 <= FRAC_PI_4) {
            return bad("theta0 must lie in (0, pi/4]");
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return bad("delta must lie in (0, 0.5)");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return bad("epsilon must lie in (0, 0.5)");
        }
        if !(1.0 < self.collar_inner && self.collar_inner < self.collar_outer) {
            return bad("collar radii must satisfy 1 < inner < outer");
        }
        Ok(())
    }

    pub fn stage_at(&self, t: f64) -> (Stage, f64) {
        let (a, b, c, d) = (self.t1, self.t2, self.t3, self.t4);
        if t <= a {
            (Stage::Inflate, t / a)
        } else if t <= b {
            (Stage::Align, (t - a) / (b - a))
        } else if t <= c {
            (Stage::Spin, (t - b) / (c - b))
        } else if t <= d {
            (Stage::Realign, (t - c) / (d - c))
        } else {
            (Stage::Deflate, ((t - d) / (1.0 - d)).min(1.0))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Inflate,
    Align,
    Spin,
    Realign,
    Deflate,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Inflate, Stage::Align, Stage::Spin, Stage::Realign, Stage::Deflate];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Inflate => "inflate",
            Stage::Align => "align",
            Stage::Spin => "spin",
            Stage::Realign => "realign",
            Stage::Deflate => "deflate",
        }
    }
}

/// A point of the sphere domain in the chart of its piece. Caps use
/// Cartesian disc coordinates, the band uses (τ, v) with τ running from
/// the north cap to the south cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartPoint {
    North(f64, f64),
    Band(f64, f64),
    South(f64, f64),
}

impl ChartPoint {
    /// The orientation-reversing swap used after the spin: caps exchanged,
    /// band flipped and sheared by `twist` turns. The sheared band meets
    /// the rotated south-side cap, so every twist is a diffeomorphism of
    /// the sphere; a full turn absorbs the Dehn twist left by the spin.
    pub fn swapped(self, twist: f64) -> ChartPoint {
        let a = TAU * twist;
        match self {
            ChartPoint::North(x, y) => ChartPoint::South(x, y),
            ChartPoint::South(x, y) => {
                let (s, c) = a.sin_cos();
                ChartPoint::North(c * x + s * y, c * y - s * x)
            }
            ChartPoint::Band(tau, v) => ChartPoint::Band(1.0 - tau, v - a * tau),
        }
    }

    fn shifted(self, a: f64, b: f64) -> ChartPoint {
        match self {
            ChartPoint::North(x, y) => ChartPoint::North(x + a, y + b),
            ChartPoint::Band(x, y) => ChartPoint::Band(x + a, y + b),
            ChartPoint::South(x, y) => ChartPoint::South(x + a, y + b),
        }
    }
}

/// Sphere grid with `cap_rings` rings per cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereLayout {
    pub grid: SphereGrid,
    pub cap_rings: usize,
}

impl SphereLayout {
    pub fn new(nu: usize, nv: usize, cap_rings: usize) -> Result<Self> {
        if nu < 4 || nv < 3 || cap_rings == 0 || 2 * cap_rings >= nu {
            return Err(Error::Config(format!("bad sphere layout {nu}x{nv} with {cap_rings} cap rings")));
        }
        Ok(SphereLayout { grid: SphereGrid::new(nu, nv), cap_rings })
    }

    pub fn band_rings(&self) -> usize {
        self.grid.nu - 2 * self.cap_rings
    }

    pub fn chart_of_ring(&self, i: usize, v: f64) -> ChartPoint {
        let (nu, c) = (self.grid.nu, self.cap_rings);
        if i <= c {
            let r = i as f64 / c as f64;
            ChartPoint::North(r * v.cos(), r * v.sin())
        } else if i >= nu - c {
            let r = (nu - i) as f64 / c as f64;
            ChartPoint::South(r * v.cos(), r * v.sin())
        } else {
            ChartPoint::Band((i - c) as f64 / self.band_rings() as f64, v)
        }
    }

    /// Chart points of all vertices in storage order.
    pub fn charts(&self) -> Vec<ChartPoint> {
        let (nu, nv) = (self.grid.nu, self.grid.nv);
        let mut out = Vec::with_capacity(self.grid.vertex_count());
        out.push(ChartPoint::North(0.0, 0.0));
        for i in 1..nu {
            for j in 0..nv {
                out.push(self.chart_of_ring(i, TAU * j as f64 / nv as f64));
            }
        }
        out.push(ChartPoint::South(0.0, 0.0));
        out
    }

    /// True for triangles lying strictly inside the band rings.
    pub fn band_triangle_mask(&self) -> Vec<bool> {
        let (nu, nv, c) = (self.grid.nu, self.grid.nv, self.cap_rings);
        let mut mask = vec![false; nv];
        for i in 1..nu - 1 {
            let inside = i >= c && i < nu - c;
            mask.extend(std::iter::repeat(inside).take(2 * nv));
        }
        mask.extend(std::iter::repeat(false).take(nv));
        mask
    }

    /// Vertex indices of band rings strictly between the caps.
    pub fn band_vertices(&self) -> Vec<u32> {
        let (nu, nv, c) = (self.grid.nu, self.grid.nv, self.cap_rings);
        (c + 1..nu - c).flat_map(|i| (0..nv).map(move |j| self.grid.ring_index(i, j))).collect()
    }

    /// Vertex indices of the two cap boundary circles.
    pub fn seam_vertices(&self) -> Vec<u32> {
        let (nu, nv, c) = (self.grid.nu, self.grid.nv, self.cap_rings);
        [c, nu - c].into_iter().flat_map(|i| (0..nv).map(move |j| self.grid.ring_index(i, j))).collect()
    }
}

/// One sampled instant of the eversion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EversionFrame {
    pub index: usize,
    pub t: f64,
    pub stage: Stage,
    pub positions: Vec<Point3>,
    pub min_sigma: f64,
    /// Vertex index where σ is smallest.
    pub min_sigma_vertex: usize,
}

/// The eversion map F(t, ·) over the sphere domain.
#[derive(Debug, Clone)]
pub struct Eversion {
    pub disc: Arc<DiscZero>,
    pub schedule: EversionSchedule,
    /// +1 or −1 so that the offset normal has positive component along the
    /// z-rotation direction at the collar.
    offset_sign: f64,
}

const NORMAL_STEP: f64 = 1e-4;

impl Eversion {
    pub fn new(disc: Arc<DiscZero>, schedule: EversionSchedule) -> Result<Self> {
        schedule.validate()?;
        if schedule.collar_outer >= disc.params.fade_start {
            return Err(Error::Config("collar must end inside the ray region".into()));
        }
        let mut e = Eversion { disc, schedule, offset_sign: 1.0 };
        let rho_of = |r: f64| 1.0 - (r - 1.0) / e.disc.params.collar_rate;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..=16 {
            let r = 1.0 + (schedule.collar_outer - 1.0) * k as f64 / 16.0;
            for j in 0..256 {
                let phi = TAU * j as f64 / 256.0;
                let rho = rho_of(r);
                let p = e.disc.point(rho, phi);
                let a = e.raw_normal(rho, phi).dot(Point3::new(-p.y, p.x, 0.0).normalized());
                lo = lo.min(a);
                hi = hi.max(a);
            }
        }
        if lo > 0.0 {
            e.offset_sign = 1.0;
        } else if hi < 0.0 {
            e.offset_sign = -1.0;
        } else {
            return Err(Error::Config("disc normal is not transverse to the rotation field on the collar".into()));
        }
        Ok(e)
    }

    fn raw_normal(&self, rho: f64, phi: f64) -> Point3 {
        self.disc.differential(rho, phi, NORMAL_STEP).normal().normalized()
    }

    /// Thickening weight: 0 near the boundary knot, 1 inside.
    pub fn lambda(&self, rho: f64) -> f64 {
        if rho >= 1.0 {
            return 0.0;
        }
        smoothstep(self.schedule.collar_inner, self.schedule.collar_outer, self.disc.radial(rho))
    }

    /// Point at disc radius ρ on sheet w ∈ [−1, 1] of the thickened disc,
    /// with the thickening weight scaled by `scale`.
    pub fn thickened(&self, rho: f64, phi: f64, w: f64, scale: f64) -> Point3 {
        let s = &self.schedule;
        let l = scale * self.lambda(rho);
        let mut p = self.disc.point(rho, phi);
        if l > 0.0 && w != 0.0 {
            p += self.raw_normal(rho, phi) * (self.offset_sign * w * s.delta * l);
        }
        rotate_z(p, w * s.theta0 * (1.0 - l))
    }

    /// Boundary of the thickened sub-disc of radius `scale / (1 + ε)`.
    pub fn offset_sphere(&self, scale: f64, c: ChartPoint) -> Point3 {
        let eps = self.schedule.epsilon;
        let k = scale / (1.0 + eps);
        match c {
            ChartPoint::North(x, y) => self.thickened(k * x.hypot(y), y.atan2(x), 1.0, 1.0),
            ChartPoint::South(x, y) => self.thickened(k * x.hypot(y), y.atan2(x), -1.0, 1.0),
            ChartPoint::Band(tau, v) => {
                let a = PI * tau;
                self.thickened(k * (1.0 + eps * a.sin()), v, a.cos(), 1.0)
            }
        }
    }

    /// Align stage at local time s: the collar tube unrolls onto the
    /// foliation annulus while the caps lose their thickening.
    pub fn align(&self, s: f64, c: ChartPoint) -> Point3 {
        let sc = &self.schedule;
        match c {
            ChartPoint::North(x, y) => self.thickened(x.hypot(y), y.atan2(x), 1.0, 1.0 - s),
            ChartPoint::South(x, y) => self.thickened(x.hypot(y), y.atan2(x), -1.0, 1.0 - s),
            ChartPoint::Band(tau, v) => {
                let a = PI * tau;
                let r = self.disc.radial(1.0 + sc.epsilon * a.sin());
                let half = -0.5 * sc.theta0 * a.cos();
                let (hs, hc) = half.sin_cos();
                let (ax, az) = foliation_arc(0.5 * sc.theta0, tau).expect("theta0 validated");
                let x = (1.0 - s) * r * hc + s * ax;
                let z = (1.0 - s) * r * hs + s * az;
                let wind = (1.0 - s) * a.cos() + s * (1.0 - 2.0 * tau);
                embed_local(2.0 * v + sc.theta0 * wind, x, z)
            }
        }
    }

    /// S_θ: the discs rotated by ±θ joined by the annulus at level θ/2.
    pub fn assemble(&self, theta: f64, c: ChartPoint) -> Point3 {
        match c {
            ChartPoint::North(x, y) => rotate_z(self.disc.point_xy(x, y), theta),
            ChartPoint::South(x, y) => rotate_z(self.disc.point_xy(x, y), -theta),
            ChartPoint::Band(tau, v) => {
                let (ax, az) = foliation_arc(0.5 * theta, tau).expect("spin angle inside (0, 2pi)");
                embed_local(2.0 * v + theta * (1.0 - 2.0 * tau), ax, az)
            }
        }
    }

    pub fn spin_angle(&self, s: f64) -> f64 {
        let t0 = self.schedule.theta0;
        t0 + (TAU - 2.0 * t0) * s
    }

    pub fn point(&self, t: f64, c: ChartPoint) -> Point3 {
        let (stage, s) = self.schedule.stage_at(t);
        self.stage_point(stage, s, c)
    }

    pub fn stage_point(&self, stage: Stage, s: f64, c: ChartPoint) -> Point3 {
        let eps = self.schedule.epsilon;
        match stage {
            Stage::Inflate => self.offset_sphere(eps + s, c),
            Stage::Align => self.align(s, c),
            Stage::Spin => self.assemble(self.spin_angle(s), c),
            Stage::Realign => self.align(1.0 - s, c.swapped(1.0)),
            Stage::Deflate => self.offset_sphere(1.0 + eps - s, c.swapped(1.0 - s)),
        }
    }

    pub fn stage_differential(&self, stage: Stage, s: f64, c: ChartPoint, h: f64) -> Differential3x2 {
        let f = |a: f64, b: f64| self.stage_point(stage, s, c.shifted(a, b));
        Differential3x2::new((f(h, 0.0) - f(-h, 0.0)) / (2.0 * h), (f(0.0, h) - f(0.0, -h)) / (2.0 * h))
    }

    pub fn stage_mesh(&self, layout: &SphereLayout, stage: Stage, s: f64) -> TriMesh {
        let pos = layout.charts().into_par_iter().map(|c| self.stage_point(stage, s, c)).collect();
        TriMesh::new(pos, layout.grid.triangles())
    }

    /// Positions and σ check for one stage instant.
    pub fn stage_frame(&self, layout: &SphereLayout, stage: Stage, s: f64, fd_step: f64) -> (Vec<Point3>, f64, usize) {
        let charts = layout.charts();
        let res: Vec<(Point3, f64)> = charts
            .par_iter()
            .map(|&c| (self.stage_point(stage, s, c), sigma_min(&self.stage_differential(stage, s, c, fd_step))))
            .collect();
        let (k, m) = res.iter().enumerate().fold((0, f64::INFINITY), |a, (i, r)| if r.1 < a.1 { (i, r.1) } else { a });
        (res.into_iter().map(|r| r.0).collect(), m, k)
    }

    pub fn frame(&self, layout: &SphereLayout, index: usize, t: f64, fd_step: f64) -> EversionFrame {
        let (stage, s) = self.schedule.stage_at(t);
        let (positions, min_sigma, min_sigma_vertex) = self.stage_frame(layout, stage, s, fd_step);
        EversionFrame { index, t, stage, positions, min_sigma, min_sigma_vertex }
    }

    /// Triangles oriented so that the t = 0 frame has outward normals.
    pub fn oriented_triangles(&self, layout: &SphereLayout) -> Vec<[u32; 3]> {
        let m = self.stage_mesh(layout, Stage::Inflate, 0.0);
        if m.signed_volume() < 0.0 {
            m.flipped().triangles
        } else {
            m.triangles
        }
    }
}

/// Settings for a full run of the eversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvertOptions {
    pub frames: usize,
    pub sigma_floor: f64,
    pub fd_step: f64,
    /// Stop at the first frame failing the σ floor.
    pub abort_on_failure: bool,
}

impl Default for EvertOptions {
    fn default() -> Self {
        EvertOptions { frames: 240, sigma_floor: 1e-3, fd_step: 1e-6, abort_on_failure: true }
    }
}

/// Frame times of an n-frame run, uniform over [0, 1].
pub fn frame_times(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| k as f64 / (n - 1) as f64).collect(),
    }
}

/// Runs the eversion, handing each frame to `sink` in order.
pub fn evert_with<F>(ev: &Eversion, layout: &SphereLayout, opts: &EvertOptions, mut sink: F) -> Result<()>
where
    F: FnMut(EversionFrame) -> Result<()>,
{
    if opts.frames < 2 {
        return Err(Error::Config("an eversion needs at least two frames".into()));
    }
    for (k, t) in frame_times(opts.frames).into_iter().enumerate() {
        let f = ev.frame(layout, k, t, opts.fd_step);
        if opts.abort_on_failure && !(f.min_sigma >= opts.sigma_floor) {
            return Err(Error::Frame {
                index: k,
                cause: format!("sigma_min {:.3e} below floor {:.3e} at vertex {}", f.min_sigma, opts.sigma_floor, f.min_sigma_vertex),
            });
        }
        sink(f)?;
    }
    Ok(())
}

/// Runs the eversion and returns every frame, checking immersion per frame.
pub fn evert(ev: &Eversion, layout: &SphereLayout, opts: &EvertOptions) -> Result<Vec<EversionFrame>> {
    let mut out = Vec::with_capacity(opts.frames);
    evert_with(ev, layout, opts, |f| {
        out.push(f);
        Ok(())
    })?;
    Ok(out)
}

/// Frame positions only, without the immersion check.
pub fn positions_at(ev: &Eversion, layout: &SphereLayout, t: f64) -> Vec<Point3> {
    let (stage, s) = ev.schedule.stage_at(t);
    ev.stage_mesh(layout, stage, s).positions
}

pub fn frame_mesh(frame: &EversionFrame, triangles: &[[u32; 3]]) -> TriMesh {
    TriMesh::new(frame.positions.clone(), triangles.to_vec())
}

pub fn frame_is_embedded(frame: &EversionFrame, triangles: &[[u32; 3]], tol: &IntersectTolerances) -> bool {
    is_embedded(&frame_mesh(frame, triangles), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::DiscParams;

    fn setup() -> (Eversion, SphereLayout) {
        let d = Arc::new(DiscZero::new(DiscParams::default()).unwrap());
        (Eversion::new(d, EversionSchedule::default()).unwrap(), SphereLayout::new(40, 48, 16).unwrap())
    }

    #[test]
    fn schedule_rejects_zero_angle() {
        let s = EversionSchedule { theta0: 0.0, ..Default::default() };
        assert!(s.validate().is_err());
        let s = EversionSchedule { t2: 0.1, ..Default::default() };
        assert!(s.validate().is_err());
    }

    #[test]
    fn stages_agree_at_boundaries() {
        let (e, l) = setup();
        for c in l.charts() {
            for (a, b) in [
                (e.offset_sphere(1.0 + e.schedule.epsilon, c), e.align(0.0, c)),
                (e.align(1.0, c), e.assemble(e.schedule.theta0, c)),
                (e.assemble(TAU - e.schedule.theta0, c), e.align(1.0, c.swapped(1.0))),
            ] {
                assert!(a.dist(b) < 1e-9, "{c:?}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn swap_is_continuous_across_seams() {
        for g in [0.0, 0.3, 1.0] {
            let v: f64 = 0.7;
            let a = ChartPoint::Band(1.0, v).swapped(g);
            let b = ChartPoint::South(v.cos(), v.sin()).swapped(g);
            match (a, b) {
                (ChartPoint::Band(t, w), ChartPoint::North(x, y)) => {
                    assert_eq!(t, 0.0);
                    assert!((x - w.cos()).abs() < 1e-12 && (y - w.sin()).abs() < 1e-12);
                }
                _ => panic!(),
            }
        }
    }

    #[test]
    fn evert_yields_uniform_frames() {
        let d = Arc::new(DiscZero::new(DiscParams::default()).unwrap());
        let e = Eversion::new(d, EversionSchedule::default()).unwrap();
        let l = SphereLayout::new(12, 16, 5).unwrap();
        let opts = EvertOptions { frames: 9, ..Default::default() };
        let f = evert(&e, &l, &opts).unwrap();
        assert_eq!(f.len(), 9);
        assert_eq!(f[4].t, 0.5);
        assert_eq!(f[0].stage, Stage::Inflate);
        assert_eq!(f[8].stage, Stage::Deflate);
        assert!(evert(&e, &l, &EvertOptions { frames: 1, ..Default::default() }).is_err());
    }

    #[test]
    fn band_mask_matches_triangle_count() {
        let (_, l) = setup();
        assert_eq!(l.band_triangle_mask().len(), l.grid.triangles().len());
        assert_eq!(l.charts().len(), l.grid.vertex_count());
    }

    #[test]
    fn seams_stay_on_rotated_knots_during_align() {
        let (e, l) = setup();
        let seams = l.seam_vertices();
        let charts = l.charts();
        let p0: Vec<Point3> = seams.iter().map(|&i| e.align(0.0, charts[i as usize])).collect();
        for s in [0.25, 0.5, 1.0] {
            for (k, &i) in seams.iter().enumerate() {
                assert!(e.align(s, charts[i as usize]).dist(p0[k]) < 1e-9);
            }
        }
    }
}
