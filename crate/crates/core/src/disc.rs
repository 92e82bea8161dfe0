//! The immersed disc D_0 bounded by the (2,−1) knot K_0.
//!
//! Radial profile, from the boundary outward:
//! * normal rays `C(2φ) + r N(φ)` leaving the core circle through K_0,
//!   which meet the boundary torus orthogonally at r = 1;
//! * the core offset is faded out so the sheet becomes the cone `r N(φ)`;
//! * the cone's direction curve is carried to a great circle by a regular
//!   homotopy on the unit sphere;
//! * the resulting plane is capped by a dome.
//!
//! Parameters `(ρ, φ)` are polar with ρ = 1 on K_0 (K_0 is traced at
//! `s = 2φ`) and ρ ∈ (1, 1 + ε] continuing the rays inside the torus.

use crate::donut::{knot_point, torus_residual, TorusKnot, CORE_RADIUS};
use crate::error::{Error, Result};
use crate::geom::{numeric_differential, rotate_z, sigma_min, Differential3x2, Point3, SampledCurve};
use crate::intersect::{self_intersections, IntersectTolerances, IntersectionInventory};
use crate::mesh::{DiscGrid, TriMesh};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use num_complex::Complex64;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiscParams {
    /// dr/dρ on the collar side of the radial map.
    pub collar_rate: f64,
    /// ρ below which the radial map follows the profile's arc length.
    pub rho_join: f64,
    /// Core offset fades over [fade_start, fade_end].
    pub fade_start: f64,
    pub fade_end: f64,
    /// Direction homotopy runs over [homotopy_start, homotopy_end].
    /// The direction curve reaches the great circle at homotopy_mid and
    /// is reparametrized uniformly by homotopy_end.
    pub homotopy_start: f64,
    pub homotopy_mid: f64,
    pub homotopy_end: f64,
    /// Radius where the plane turns into the dome.
    pub plane_end: f64,
    pub fillet: f64,
    /// Stereographic pole for the direction homotopy.
    pub pole: [f64; 3],
    /// Weight of the linear angle in the circle parametrization.
    pub circle_blend: f64,
    pub harmonics: usize,
}

impl Default for DiscParams {
    fn default() -> Self {
        DiscParams {
            collar_rate: 9.0,
            rho_join: 0.9,
            fade_start: 2.0,
            fade_end: 6.0,
            homotopy_start: 6.5,
            homotopy_mid: 40.0,
            homotopy_end: 50.0,
            plane_end: 52.0,
            fillet: 3.0,
            pole: [0.0735, 0.8785, -0.472],
            circle_blend: 0.15,
            harmonics: 16,
        }
    }
}

/// Direction curve N(φ) of the normal rays.
#[inline]
pub fn ray_direction(phi: f64) -> Point3 {
    let (s, c) = phi.sin_cos();
    let (s2, c2) = (2.0 * phi).sin_cos();
    Point3::new(c * c2, c * s2, s)
}

#[inline]
fn ray_direction_d(phi: f64) -> Point3 {
    let (s, c) = phi.sin_cos();
    let (s2, c2) = (2.0 * phi).sin_cos();
    Point3::new(-s * c2 - 2.0 * c * s2, -s * s2 + 2.0 * c * c2, c)
}

#[inline]
fn core_point(lon: f64) -> Point3 {
    let (s, c) = lon.sin_cos();
    Point3::new(CORE_RADIUS * c, CORE_RADIUS * s, 0.0)
}

/// Quintic smoothstep on [a, b].
#[inline]
pub fn smoothstep(a: f64, b: f64, x: f64) -> f64 {
    let t = ((x - a) / (b - a)).clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

const CORRECTION_HARMONICS: usize = 48;
const CORRECTION_KNOTS: usize = 64;

/// Regular homotopy of the ray direction curve to a great circle, built
/// in a stereographic chart from `pole`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionHomotopy {
    pole: Point3,
    e1: Point3,
    e2: Point3,
    coeffs: Vec<(f64, f64)>,
    blend: f64,
    /// Fourier coefficients (k = ±1..=CORRECTION_HARMONICS) of the chart
    /// correction at uniform η knots.
    correction: Vec<Vec<Complex64>>,
    /// Minimum angular clearance between the curve and circle tangents.
    pub clearance: f64,
}

impl DirectionHomotopy {
    pub fn new(pole: Point3, harmonics: usize, blend: f64) -> Result<Self> {
        let pole = pole.normalized();
        let e1 = pole.cross(Point3::new(0.3, 0.5, 0.7)).normalized();
        let e2 = pole.cross(e1);
        let mut h = DirectionHomotopy { pole, e1, e2, coeffs: Vec::new(), blend, correction: Vec::new(), clearance: 0.0 };
        let m = 8192;
        let phis: Vec<f64> = (0..m).map(|i| TAU * i as f64 / m as f64).collect();
        let mut th: Vec<f64> = phis.iter().map(|&f| h.chart_velocity(f).1.atan2(h.chart_velocity(f).0)).collect();
        for i in 1..m {
            th[i] = th[i - 1] + crate::geom::wrap_pi(th[i] - th[i - 1]);
        }
        let turns = ((th[m - 1] - th[0] + crate::geom::wrap_pi(th[0] - th[m - 1])) / TAU).round();
        if turns != -1.0 {
            return Err(Error::Config(format!("direction curve turns {turns} times in the chart; pole unusable")));
        }
        // a monotone angle within π of the tangent angle, from running envelopes
        let ext: Vec<f64> = (0..3 * m).map(|k| th[k % m] + TAU * (1.0 - (k / m) as f64)).collect();
        let mut upper = vec![0.0; 3 * m];
        let mut lower = vec![0.0; 3 * m];
        let mut acc = f64::INFINITY;
        for k in 0..3 * m {
            acc = acc.min(ext[k] + PI);
            upper[k] = acc;
        }
        acc = f64::NEG_INFINITY;
        for k in (0..3 * m).rev() {
            acc = acc.max(ext[k] - PI);
            lower[k] = acc;
        }
        let g: Vec<f64> = (0..m).map(|i| 0.5 * (upper[m + i] + lower[m + i]) + phis[i]).collect();
        let taper = 0.6 * harmonics as f64;
        h.coeffs = (0..=harmonics)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (i, &f) in phis.iter().enumerate() {
                    let (s, c) = (k as f64 * f).sin_cos();
                    re += g[i] * c;
                    im -= g[i] * s;
                }
                let w = (-(k as f64 / taper).powi(2)).exp() / m as f64;
                (re * w, im * w)
            })
            .collect();
        let mut clear = f64::INFINITY;
        for (i, &f) in phis.iter().enumerate() {
            let gap = crate::geom::wrap_pi(th[i] - h.target_angle(f));
            clear = clear.min(PI - gap.abs());
        }
        if !(clear > 0.05) {
            return Err(Error::Config(format!("circle parametrization clearance {clear:.3} too small")));
        }
        h.clearance = clear;
        h.correction = h.correction_table(&phis, &th);
        Ok(h)
    }

    /// Chart curves whose tangent angle and speed interpolate linearly
    /// between the source curve and the circle, closed up by dropping the
    /// mean velocity; stored as corrections to the straight-line blend.
    fn correction_table(&self, phis: &[f64], th: &[f64]) -> Vec<Vec<Complex64>> {
        use rayon::prelude::*;
        let m = phis.len();
        let speed0: Vec<f64> = phis.iter().map(|&f| {
            let (x, y) = self.chart_velocity(f);
            x.hypot(y)
        }).collect();
        let mut thc: Vec<f64> = phis.iter().map(|&f| self.target_angle(f)).collect();
        let shift = TAU * ((th[0] - thc[0]) / TAU).round();
        thc.iter_mut().for_each(|t| *t += shift);
        let speedc: Vec<f64> = phis.iter().map(|&f| (self.series(f).1 * (1.0 - self.blend) - 1.0).abs()).collect();
        let q0: Vec<Complex64> = phis.iter().map(|&f| {
            let (x, y) = self.stereo(ray_direction(f));
            Complex64::new(x, y)
        }).collect();
        let qc: Vec<Complex64> = phis.iter().map(|&f| Complex64::from_polar(1.0, self.circle_angle(f))).collect();
        let n = CORRECTION_HARMONICS as i64;
        let dft = |f: &dyn Fn(usize) -> Complex64, k: i64| -> Complex64 {
            let w = Complex64::from_polar(1.0, -TAU * k as f64 / m as f64);
            let mut z = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..m {
                acc += f(i) * z;
                z *= w;
            }
            acc / m as f64
        };
        let ks: Vec<i64> = (-n..=n).filter(|&k| k != 0).collect();
        let base0: Vec<Complex64> = ks.iter().map(|&k| dft(&|i| q0[i], k)).collect();
        let basec: Vec<Complex64> = ks.iter().map(|&k| dft(&|i| qc[i], k)).collect();
        (0..=CORRECTION_KNOTS)
            .into_par_iter()
            .map(|j| {
                let eta = j as f64 / CORRECTION_KNOTS as f64;
                if j == 0 || j == CORRECTION_KNOTS {
                    return vec![Complex64::new(0.0, 0.0); ks.len()];
                }
                let vel: Vec<Complex64> = (0..m)
                    .map(|i| Complex64::from_polar((1.0 - eta) * speed0[i] + eta * speedc[i], (1.0 - eta) * th[i] + eta * thc[i]))
                    .collect();
                ks.iter()
                    .enumerate()
                    .map(|(a, &k)| dft(&|i| vel[i], k) / Complex64::new(0.0, k as f64) - base0[a] * (1.0 - eta) - basec[a] * eta)
                    .collect()
            })
            .collect()
    }

    /// Chart correction at (η, φ), cubic Hermite in η between knots.
    fn correction_at(&self, eta: f64, phi: f64) -> Complex64 {
        let kn = CORRECTION_KNOTS;
        let x = eta.clamp(0.0, 1.0) * kn as f64;
        let j = (x.floor() as usize).min(kn - 1);
        let t = x - j as f64;
        let c = &self.correction;
        let slope = |i: usize, a: usize| -> Complex64 {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(kn);
            (c[hi][a] - c[lo][a]) / (hi - lo) as f64
        };
        let (t2, t3) = (t * t, t * t * t);
        let (h00, h10, h01, h11) = (2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + t, -2.0 * t3 + 3.0 * t2, t3 - t2);
        let step = Complex64::from_polar(1.0, phi);
        let n = CORRECTION_HARMONICS;
        // harmonics stored as k = −n..−1 then 1..n
        let mut pos = step;
        let mut neg = step.conj();
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            let (ip, ineg) = (n - 1 + k, n - k);
            for (a, z) in [(ip, pos), (ineg, neg)] {
                let v = c[j][a] * h00 + slope(j, a) * h10 + c[j + 1][a] * h01 + slope(j + 1, a) * h11;
                acc += v * z;
            }
            pos *= step;
            neg *= step.conj();
        }
        acc
    }

    fn stereo(&self, p: Point3) -> (f64, f64) {
        let d = 1.0 - p.dot(self.pole);
        (p.dot(self.e1) / d, p.dot(self.e2) / d)
    }

    fn inverse(&self, x: f64, y: f64) -> Point3 {
        let n2 = x * x + y * y;
        (self.e1 * (2.0 * x) + self.e2 * (2.0 * y) + self.pole * (n2 - 1.0)) / (n2 + 1.0)
    }

    fn chart_velocity(&self, phi: f64) -> (f64, f64) {
        let p = ray_direction(phi);
        let dp = ray_direction_d(phi);
        let d = 1.0 - p.dot(self.pole);
        let dd = -dp.dot(self.pole);
        let f = |e: Point3| (dp.dot(e) * d - p.dot(e) * dd) / (d * d);
        (f(self.e1), f(self.e2))
    }

    /// Fourier series of the fitted angle plus φ (a periodic function).
    fn series(&self, phi: f64) -> (f64, f64) {
        let mut v = self.coeffs[0].0;
        let mut dv = 0.0;
        for (k, &(re, im)) in self.coeffs.iter().enumerate().skip(1) {
            let kf = k as f64;
            let (s, c) = (kf * phi).sin_cos();
            v += 2.0 * (re * c - im * s);
            dv += 2.0 * kf * (-re * s - im * c);
        }
        (v, dv)
    }

    /// Tangent angle of the target circle parametrization.
    fn target_angle(&self, phi: f64) -> f64 {
        let (g, _) = self.series(phi);
        (1.0 - self.blend) * g + self.blend * self.coeffs[0].0 - phi
    }

    fn circle_angle(&self, phi: f64) -> f64 {
        self.target_angle(phi) + FRAC_PI_2
    }

    fn linear_angle(&self, phi: f64) -> f64 {
        self.coeffs[0].0 + FRAC_PI_2 - phi
    }

    /// Direction curve at homotopy time `eta` in [0, 2]: 0 is N, 1 the
    /// equator of the chart with the fitted parametrization, 2 the same
    /// equator traversed uniformly.
    pub fn direction(&self, eta: f64, phi: f64) -> Point3 {
        if eta <= 0.0 {
            return ray_direction(phi);
        }
        if eta <= 1.0 {
            let (x0, y0) = self.stereo(ray_direction(phi));
            let (s, c) = self.circle_angle(phi).sin_cos();
            let d = self.correction_at(eta, phi);
            self.inverse((1.0 - eta) * x0 + eta * c + d.re, (1.0 - eta) * y0 + eta * s + d.im)
        } else {
            let e = eta.min(2.0) - 1.0;
            let a = (1.0 - e) * self.circle_angle(phi) + e * self.linear_angle(phi);
            let (s, c) = a.sin_cos();
            self.e1 * c + self.e2 * s
        }
    }

    /// Unit normal of the final great circle's plane.
    pub fn axis(&self) -> Point3 {
        self.pole
    }
}

/// Arc-length table for the radial map: cumulative weight, profile
/// radius, weight.
#[derive(Debug, Clone, PartialEq)]
struct RadialTable {
    knots: Vec<(f64, f64, f64)>,
}

impl RadialTable {
    fn total(&self) -> f64 {
        self.knots.last().map_or(0.0, |k| k.0)
    }

    /// Profile radius at cumulative weight `s`, cubic Hermite between knots.
    fn radius(&self, s: f64) -> f64 {
        let k = &self.knots;
        let i = k.partition_point(|x| x.0 <= s).clamp(1, k.len() - 1) - 1;
        let (s0, r0, w0) = k[i];
        let (s1, r1, w1) = k[i + 1];
        let h = s1 - s0;
        let t = ((s - s0) / h).clamp(0.0, 1.0);
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * r0
            + (t3 - 2.0 * t2 + t) * h / w0
            + (-2.0 * t3 + 3.0 * t2) * r1
            + (t3 - t2) * h / w1
    }
}

/// The disc D_0.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscZero {
    pub params: DiscParams,
    homotopy: DirectionHomotopy,
    table: RadialTable,
    r_top: f64,
}

const TABLE_STEP: f64 = 0.02;
const TABLE_ANGLES: usize = 256;
const BLEND_WIDTH: f64 = 2.0;
/// Beyond this radius the radial sampling weight falls off like 1/r.
const SCALE_RADIUS: f64 = 6.0;

impl DiscZero {
    pub fn new(params: DiscParams) -> Result<Self> {
        let p = &params;
        let ordered = [1.0, p.fade_start, p.fade_end, p.homotopy_start, p.homotopy_mid, p.homotopy_end, p.plane_end];
        if ordered.windows(2).any(|w| !(w[0] < w[1])) || p.fillet <= 0.0 {
            return Err(Error::Config("disc radii must increase: 1 < fade < homotopy < plane".into()));
        }
        if !(p.rho_join > 0.0 && p.rho_join < 1.0) || p.collar_rate <= 0.0 {
            return Err(Error::Config("disc radial map parameters out of range".into()));
        }
        let r_join = 1.0 + p.collar_rate * (1.0 - p.rho_join);
        if r_join + BLEND_WIDTH > p.homotopy_start {
            return Err(Error::Config("collar reaches the direction homotopy".into()));
        }
        let pole = Point3::new(p.pole[0], p.pole[1], p.pole[2]);
        let homotopy = DirectionHomotopy::new(pole, p.harmonics, p.circle_blend)?;
        let big = p.plane_end + p.fillet;
        let r_top = p.plane_end + FRAC_PI_2 * p.fillet + FRAC_PI_2 * big;
        let mut d = DiscZero { params: *p, homotopy, table: RadialTable { knots: Vec::new() }, r_top };
        d.table = d.radial_table(r_join);
        Ok(d)
    }

    /// Radial speed of the profile (damped like 1/r far out), smoothed, blended at the join into the
    /// weight that matches the collar's slope.
    fn radial_table(&self, r_join: f64) -> RadialTable {
        use rayon::prelude::*;
        let n = ((self.r_top - r_join) / TABLE_STEP).ceil() as usize;
        let radii: Vec<f64> = (0..=n).map(|i| r_join + (self.r_top - r_join) * i as f64 / n as f64).collect();
        let h = 1e-5;
        let speed: Vec<f64> = radii
            .par_iter()
            .map(|&r| {
                let (lo, hi) = ((r - h).max(r_join), (r + h).min(self.r_top));
                (0..TABLE_ANGLES)
                    .map(|j| {
                        let f = TAU * j as f64 / TABLE_ANGLES as f64;
                        (self.profile_point(hi, f) - self.profile_point(lo, f)).norm() / (hi - lo)
                    })
                    .fold(1.0, f64::max)
                    * (SCALE_RADIUS / r).min(1.0)
            })
            .collect();
        let win = 10;
        let grown: Vec<f64> = (0..=n).map(|i| speed[i.saturating_sub(win)..=(i + win).min(n)].iter().cloned().fold(0.0, f64::max)).collect();
        let smooth: Vec<f64> = (0..=n)
            .map(|i| {
                let s = &grown[i.saturating_sub(win)..=(i + win).min(n)];
                s.iter().sum::<f64>() / s.len() as f64
            })
            .collect();
        let blend: Vec<f64> = radii.iter().map(|&r| smoothstep(r_join, r_join + BLEND_WIDTH, r)).collect();
        let integrate = |w: &dyn Fn(usize) -> f64| -> f64 {
            (0..n).map(|i| 0.5 * (w(i) + w(i + 1)) * (radii[i + 1] - radii[i])).sum()
        };
        // total = A + B·w_join and w_join = total / (collar_rate · rho_join)
        let a = integrate(&|i| blend[i] * smooth[i]);
        let b = integrate(&|i| 1.0 - blend[i]);
        let w_join = a / (self.params.collar_rate * self.params.rho_join - b);
        let w: Vec<f64> = (0..=n).map(|i| (1.0 - blend[i]) * w_join + blend[i] * smooth[i]).collect();
        let mut knots = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        knots.push((0.0, radii[0], w[0]));
        for i in 0..n {
            acc += 0.5 * (w[i] + w[i + 1]) * (radii[i + 1] - radii[i]);
            knots.push((acc, radii[i + 1], w[i + 1]));
        }
        RadialTable { knots }
    }

    pub fn homotopy(&self) -> &DirectionHomotopy {
        &self.homotopy
    }

    /// Radial profile parameter for disc radius ρ.
    pub fn radial(&self, rho: f64) -> f64 {
        let p = &self.params;
        if rho >= p.rho_join {
            1.0 + p.collar_rate * (1.0 - rho)
        } else {
            let total = self.table.total();
            self.table.radius(total * (1.0 - rho / p.rho_join))
        }
    }

    pub fn profile_point(&self, r: f64, phi: f64) -> Point3 {
        let p = &self.params;
        if r <= p.fade_end {
            let w = 1.0 - smoothstep(p.fade_start, p.fade_end, r);
            return core_point(2.0 * phi) * w + ray_direction(phi) * r;
        }
        if r <= p.plane_end {
            let eta = smoothstep(p.homotopy_start.ln(), p.homotopy_mid.ln(), r.ln()) + smoothstep(p.homotopy_mid, p.homotopy_end, r);
            return self.homotopy.direction(eta, phi) * r;
        }
        let g = self.homotopy.direction(2.0, phi);
        let n = self.homotopy.axis();
        let l = r - p.plane_end;
        let f = p.fillet;
        let (a, h) = if l <= FRAC_PI_2 * f {
            let t = l / f;
            (p.plane_end + f * t.sin(), f * (1.0 - t.cos()))
        } else {
            let big = p.plane_end + f;
            let t = ((l - FRAC_PI_2 * f) / big).min(FRAC_PI_2);
            (big * t.cos(), f + big * t.sin())
        };
        g * a + n * h
    }

    pub fn point(&self, rho: f64, phi: f64) -> Point3 {
        self.profile_point(self.radial(rho), phi)
    }

    /// Point in the Cartesian chart (x, y) = ρ (cos φ, sin φ).
    pub fn point_xy(&self, x: f64, y: f64) -> Point3 {
        self.point(x.hypot(y), y.atan2(x))
    }

    /// Differential in the Cartesian chart; regular at the centre.
    pub fn differential(&self, rho: f64, phi: f64, h: f64) -> Differential3x2 {
        let (s, c) = phi.sin_cos();
        numeric_differential(|x, y| self.point_xy(x, y), rho * c, rho * s, h)
    }

    pub fn unit_normal(&self, rho: f64, phi: f64) -> Point3 {
        self.differential(rho, phi, 1e-6).normal().normalized()
    }

    pub fn top_radius(&self) -> f64 {
        self.r_top
    }
}

/// A rotated copy D_θ of the disc with a sampling grid.
#[derive(Debug, Clone)]
pub struct ImmersedPatch {
    pub disc: Arc<DiscZero>,
    pub rotation: f64,
    pub grid: DiscGrid,
}

impl ImmersedPatch {
    pub fn point(&self, rho: f64, phi: f64) -> Point3 {
        rotate_z(self.disc.point(rho, phi), self.rotation)
    }

    pub fn differential(&self, rho: f64, phi: f64, h: f64) -> Differential3x2 {
        self.disc.differential(rho, phi, h).rotated_z(self.rotation)
    }

    pub fn mesh(&self) -> TriMesh {
        self.grid.mesh(|r, v| self.point(r, v))
    }

    pub fn boundary_curve(&self, n: usize) -> SampledCurve {
        SampledCurve::sample(|v| self.point(1.0, v), 0.0, TAU, n, true)
    }

    /// Minimum σ over the grid vertices and where it occurs.
    pub fn min_sigma(&self, h: f64) -> (f64, (f64, f64)) {
        use rayon::prelude::*;
        self.grid
            .params()
            .into_par_iter()
            .map(|(r, v)| (sigma_min(&self.differential(r, v, h)), (r, v)))
            .reduce(|| (f64::INFINITY, (0.0, 0.0)), |a, b| if b.0 < a.0 { b } else { a })
    }
}

pub fn build_disc(params: DiscParams, grid: DiscGrid) -> Result<ImmersedPatch> {
    Ok(ImmersedPatch { disc: Arc::new(DiscZero::new(params)?), rotation: 0.0, grid })
}

pub fn rotate_disc(d0: &ImmersedPatch, theta: f64) -> ImmersedPatch {
    ImmersedPatch { disc: d0.disc.clone(), rotation: d0.rotation + theta, grid: d0.grid }
}

/// The double arcs of a disc with their preimages in the parameter disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaspDescriptor {
    pub arcs: Vec<SampledCurve>,
    /// Parameter-domain (ρ, φ) points of the two sheets, per arc.
    pub preimages: Vec<(Vec<(f64, f64)>, Vec<(f64, f64)>)>,
    /// Double-arc endpoints lying on the disc boundary.
    pub boundary_endpoints: usize,
    pub triple_points: usize,
}

fn barycentric(p: Point3, t: &[Point3; 3]) -> [f64; 3] {
    let v0 = t[1] - t[0];
    let v1 = t[2] - t[0];
    let v2 = p - t[0];
    let (d00, d01, d11) = (v0.dot(v0), v0.dot(v1), v1.dot(v1));
    let (d20, d21) = (v2.dot(v0), v2.dot(v1));
    let den = d00 * d11 - d01 * d01;
    let b = (d11 * d20 - d01 * d21) / den;
    let c = (d00 * d21 - d01 * d20) / den;
    [1.0 - b - c, b, c]
}

pub fn clasp_descriptor(patch: &ImmersedPatch, mesh: &TriMesh, inv: &IntersectionInventory) -> ClaspDescriptor {
    let params = patch.grid.params();
    let to_param = |tri: u32, p: Point3| {
        let t = mesh.triangles[tri as usize];
        let w = barycentric(p, &mesh.tri(tri as usize));
        let (mut x, mut y) = (0.0, 0.0);
        for k in 0..3 {
            let (r, v) = params[t[k] as usize];
            x += w[k] * r * v.cos();
            y += w[k] * r * v.sin();
        }
        (x.hypot(y), y.atan2(x).rem_euclid(TAU))
    };
    let boundary_tol = 1.5 / patch.grid.nr as f64;
    let mut arcs = Vec::new();
    let mut pre = Vec::new();
    let mut boundary_endpoints = 0;
    for c in &inv.curves {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut pts = Vec::new();
        for &k in &c.segments {
            let s = &inv.segments[k];
            pts.push(s.a);
            a.push(to_param(s.tris.0, s.a));
            b.push(to_param(s.tris.1, s.a));
        }
        if c.open_ends > 0 {
            boundary_endpoints += a.iter().chain(b.iter()).filter(|q| q.0 > 1.0 - boundary_tol).count().min(c.open_ends);
        }
        arcs.push(SampledCurve { params: (0..pts.len()).map(|i| i as f64).collect(), points: pts, closed: c.open_ends == 0 });
        pre.push((a, b));
    }
    ClaspDescriptor { arcs, preimages: pre, boundary_endpoints, triple_points: inv.triple_points.len() }
}

/// Summary of the disc checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscReport {
    pub min_sigma: f64,
    pub min_sigma_at: (f64, f64),
    pub double_curves: usize,
    pub triple_points: usize,
    pub open_ends: Vec<usize>,
    pub collar_linking: f64,
    pub boundary_residual: f64,
    pub max_orthogonality_error_deg: f64,
    pub collar_outside: bool,
    pub boundary_knot_error: f64,
}

/// Collar curve at disc radius `1 − width` (just outside the torus).
pub fn collar_curve(patch: &ImmersedPatch, width: f64, n: usize) -> SampledCurve {
    SampledCurve::sample(|v| patch.point(1.0 - width, v), 0.0, TAU, n, true)
}

pub fn check_disc(patch: &ImmersedPatch, tol: &IntersectTolerances, collar_width: f64, fd_step: f64) -> DiscReport {
    let (min_sigma, min_sigma_at) = patch.min_sigma(fd_step);
    let mesh = patch.mesh();
    let inv = self_intersections(&mesh, tol);
    let n = patch.grid.nv;
    let boundary = patch.boundary_curve(n);
    let collar = collar_curve(patch, collar_width, n);
    let collar_linking = crate::certify::gauss_linking(&boundary, &collar).unwrap_or(f64::NAN);
    let boundary_residual = boundary.points.iter().map(|&p| torus_residual(p).abs()).fold(0.0, f64::max);
    let knot = TorusKnot::new(patch.rotation);
    let boundary_knot_error = boundary
        .params
        .iter()
        .zip(&boundary.points)
        .map(|(&v, &p)| p.dist(knot_point(&knot, 2.0 * v)))
        .fold(0.0, f64::max);
    let mut worst = 0.0f64;
    let mut outside = true;
    for &v in &boundary.params {
        let p = patch.point(1.0, v);
        let d = patch.differential(1.0, v, fd_step);
        let n_disc = d.normal().normalized();
        let rho = p.rho();
        let radial = Point3::new(p.x / rho, p.y / rho, 0.0);
        let n_torus = (radial * (rho - CORE_RADIUS) + Point3::new(0.0, 0.0, p.z)).normalized();
        let ang = n_disc.dot(n_torus).abs().min(1.0).acos().to_degrees();
        worst = worst.max((90.0 - ang).abs());
        if torus_residual(patch.point(1.0 - collar_width, v)) <= 0.0 {
            outside = false;
        }
    }
    DiscReport {
        min_sigma,
        min_sigma_at,
        double_curves: inv.curve_count(),
        triple_points: inv.triple_points.len(),
        open_ends: inv.curves.iter().map(|c| c.open_ends).collect(),
        collar_linking,
        boundary_residual,
        max_orthogonality_error_deg: worst,
        collar_outside: outside,
        boundary_knot_error,
    }
}
