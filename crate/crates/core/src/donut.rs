//! The twisted solid donut: a unit disc centred at distance √2 from the
//! z-axis, revolved once while turning half a turn about its own centre.

use crate::error::{Error, Result};
use crate::geom::{accumulated_turns, rotate_z, Point3, SampledCurve};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

pub const CORE_RADIUS: f64 = SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DonutCoords {
    pub theta: f64,
    pub r: f64,
    pub phi: f64,
}

impl DonutCoords {
    pub fn new(theta: f64, r: f64, phi: f64) -> Self {
        DonutCoords { theta, r, phi }
    }
}

pub fn donut_embed(c: DonutCoords) -> Result<Point3> {
    if !(0.0..=1.0).contains(&c.r) {
        return Err(Error::RadiusOutOfRange(c.r));
    }
    Ok(embed_unchecked(c.theta, c.r, c.phi))
}

#[inline]
pub(crate) fn embed_unchecked(theta: f64, r: f64, phi: f64) -> Point3 {
    let a = phi + 0.5 * theta;
    let rho = CORE_RADIUS + r * a.cos();
    let (s, c) = theta.sin_cos();
    Point3::new(rho * c, rho * s, r * a.sin())
}

/// Embeds a point given in disc-local coordinates (x radial, z vertical)
/// of the untwisted disc at revolution angle `theta`.
#[inline]
pub fn embed_local(theta: f64, x: f64, z: f64) -> Point3 {
    let (s, c) = (0.5 * theta).sin_cos();
    let xx = c * x - s * z;
    let zz = s * x + c * z;
    let rho = CORE_RADIUS + xx;
    let (st, ct) = theta.sin_cos();
    Point3::new(rho * ct, rho * st, zz)
}

/// Signed residual of the boundary torus equation.
#[inline]
pub fn torus_residual(p: Point3) -> f64 {
    let d = p.rho() - CORE_RADIUS;
    d * d + p.z * p.z - 1.0
}

/// Geometric meridian angle of `p`, oriented so that a meridian loop links
/// the anticlockwise core circle positively.
#[inline]
pub fn meridian_angle(p: Point3) -> f64 {
    (-p.z).atan2(p.rho() - CORE_RADIUS)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusKnot {
    pub theta_offset: f64,
}

impl TorusKnot {
    pub fn new(theta_offset: f64) -> Self {
        TorusKnot { theta_offset }
    }

    pub fn point(&self, s: f64) -> Point3 {
        knot_point(self, s)
    }

    /// Unit tangent d/ds.
    pub fn tangent(&self, s: f64) -> Point3 {
        let a = 0.5 * s;
        let rho = CORE_RADIUS + a.cos();
        let drho = -0.5 * a.sin();
        let (st, ct) = s.sin_cos();
        let d = Point3::new(drho * ct - rho * st, drho * st + rho * ct, 0.5 * a.cos());
        rotate_z(d, self.theta_offset).normalized()
    }

    pub fn sample(&self, n: usize) -> SampledCurve {
        SampledCurve::sample(|s| knot_point(self, s), 0.0, 2.0 * TAU, n, true)
    }
}

pub fn knot_point(k: &TorusKnot, s: f64) -> Point3 {
    rotate_z(embed_unchecked(s, 1.0, 0.0), k.theta_offset)
}

/// Point of the foliating arc at level `phi` in disc-local (x, z).
///
/// `tau` in [0,1] is normalized arc length, running from the unit-circle
/// point at angle −phi to the one at +phi.
pub fn foliation_arc(phi: f64, tau: f64) -> Result<(f64, f64)> {
    if !(phi > 0.0 && phi < PI) {
        return Err(Error::LevelOutOfRange(phi));
    }
    let c = phi.cos();
    if c.abs() < 1e-12 {
        return Ok((0.0, 2.0 * tau - 1.0));
    }
    let centre = 1.0 / c;
    let radius = (phi.tan()).abs();
    let (g0, g1) = if c > 0.0 {
        (1.5 * PI - phi, FRAC_PI_2 + phi)
    } else {
        (FRAC_PI_2 - phi, phi - FRAC_PI_2)
    };
    let g = g0 + (g1 - g0) * tau;
    Ok((centre + radius * g.cos(), radius * g.sin()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoliationAnnulus {
    pub phi: f64,
}

impl FoliationAnnulus {
    pub fn new(phi: f64) -> Result<Self> {
        foliation_arc(phi, 0.0)?;
        Ok(FoliationAnnulus { phi })
    }

    /// Boundary knot offsets at tau = 0 and tau = 1.
    pub fn boundary_offsets(&self) -> (f64, f64) {
        (2.0 * self.phi, -2.0 * self.phi)
    }
}

/// Annulus chart over s in [0, 4π); the π-twist carries the arc at level
/// phi to the one at π − phi after one revolution.
pub fn annulus_point(a: &FoliationAnnulus, s: f64, tau: f64) -> Point3 {
    let (x, z) = foliation_arc(a.phi, tau).expect("level validated at construction");
    embed_local(s, x, z)
}

pub fn mobius_point(s: f64, u: f64) -> Point3 {
    embed_local(s, 0.0, u)
}

/// (longitudinal, meridional) turns of a closed curve near the boundary torus.
pub fn windings(c: &SampledCurve) -> (f64, f64) {
    let lon = accumulated_turns(c.points.iter().map(|p| p.y.atan2(p.x)), c.closed);
    let mer = accumulated_turns(c.points.iter().map(|&p| meridian_angle(p)), c.closed);
    (lon, mer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn boundary_points_d1_d2() {
        let d2 = donut_embed(DonutCoords::new(0.0, 1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(d2.x, SQRT_2 + 1.0, epsilon = 1e-15);
        let d1 = donut_embed(DonutCoords::new(0.0, 1.0, PI)).unwrap();
        assert_abs_diff_eq!(d1.x, SQRT_2 - 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d1.z, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn twist_identification() {
        for &(r, phi) in &[(0.3f64, 0.1f64), (1.0, 2.0), (0.0, -1.0)] {
            let a = donut_embed(DonutCoords::new(TAU, r, phi)).unwrap();
            let b = donut_embed(DonutCoords::new(0.0, r, phi + PI)).unwrap();
            assert!(a.dist(b) < 1e-14);
        }
    }

    #[test]
    fn rejects_radius_outside_unit_interval() {
        assert!(donut_embed(DonutCoords::new(0.0, 1.5, 0.0)).is_err());
        assert!(donut_embed(DonutCoords::new(0.0, -0.1, 0.0)).is_err());
    }

    #[test]
    fn embed_local_matches_polar() {
        let (th, r, ph) = (0.7, 0.6, 1.1f64);
        let a = embed_local(th, r * ph.cos(), r * ph.sin());
        let b = embed_unchecked(th, r, ph);
        assert!(a.dist(b) < 1e-14);
    }

    #[test]
    fn knot_examples() {
        let k = TorusKnot::new(0.0);
        assert!(k.point(0.0).dist(Point3::new(SQRT_2 + 1.0, 0.0, 0.0)) < 1e-15);
        assert!(k.point(TAU).dist(Point3::new(SQRT_2 - 1.0, 0.0, 0.0)) < 1e-14);
    }

    #[test]
    fn knot_meets_half_plane_at_expected_disc_angles() {
        // K_theta hits y = 0, x > 0 where s + theta = 0 or 2π (mod 4π)
        let th = 0.4;
        let k = TorusKnot::new(th);
        for (s, want) in [(-th, -th / 2.0), (TAU - th, PI - th / 2.0)] {
            let p = k.point(s);
            assert!(p.y.abs() < 1e-14 && p.x > 0.0);
            let ang = p.z.atan2(p.x - SQRT_2);
            assert!(crate::geom::wrap_pi(ang - want).abs() < 1e-12);
        }
    }

    #[test]
    fn knot_tangent_matches_difference_quotient() {
        let k = TorusKnot::new(0.3);
        let s = 1.7;
        let h = 1e-6;
        let fd = ((k.point(s + h) - k.point(s - h)) / (2.0 * h)).normalized();
        assert!(fd.dist(k.tangent(s)) < 1e-8);
    }

    #[test]
    fn foliation_arc_examples() {
        let (x, z) = foliation_arc(FRAC_PI_2, 0.5).unwrap();
        assert_abs_diff_eq!(x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z, 0.0, epsilon = 1e-15);
        let phi = PI / 3.0;
        let (x0, z0) = foliation_arc(phi, 0.0).unwrap();
        let (x1, z1) = foliation_arc(phi, 1.0).unwrap();
        assert_abs_diff_eq!(x0, phi.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(z0, -phi.sin(), epsilon = 1e-12);
        assert_abs_diff_eq!(x1, phi.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(z1, phi.sin(), epsilon = 1e-12);
        assert!(foliation_arc(0.0, 0.5).is_err());
        assert!(foliation_arc(PI, 0.5).is_err());
    }

    #[test]
    fn foliation_arc_is_orthogonal_to_unit_circle() {
        for &phi in &[0.2f64, 1.0, 2.0, 2.9] {
            let c1 = (1.0 / phi.cos(), 0.0);
            for tau in [0.0, 1.0] {
                let (x, z) = foliation_arc(phi, tau).unwrap();
                let dot = (x - c1.0) * x + (z - c1.1) * z;
                assert!(dot.abs() < 1e-9, "phi {phi} tau {tau}: {dot}");
            }
        }
    }

    #[test]
    fn foliation_arc_stays_inside_disc() {
        for &phi in &[0.1, 0.8, FRAC_PI_2, 2.3, 3.0] {
            for i in 0..=64 {
                let (x, z) = foliation_arc(phi, i as f64 / 64.0).unwrap();
                assert!(x * x + z * z <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn annulus_boundaries_are_knots() {
        let a = FoliationAnnulus::new(0.35).unwrap();
        let (o0, o1) = a.boundary_offsets();
        for i in 0..16 {
            let s = 4.0 * PI * i as f64 / 16.0;
            let p0 = annulus_point(&a, s, 0.0);
            let p1 = annulus_point(&a, s, 1.0);
            assert!(torus_residual(p0).abs() < 1e-12);
            assert!(torus_residual(p1).abs() < 1e-12);
            // the boundary at s is K_o at parameter s - o
            assert!(p0.dist(TorusKnot::new(o0).point(s - o0)) < 1e-12);
            assert!(p1.dist(TorusKnot::new(o1).point(s - o1)) < 1e-12);
        }
    }

    #[test]
    fn half_level_annulus_double_covers_mobius() {
        let a = FoliationAnnulus::new(FRAC_PI_2).unwrap();
        for &(s, tau) in &[(0.3, 0.2), (2.0, 0.9), (5.0, 0.5)] {
            let u = 2.0 * tau - 1.0;
            assert!(annulus_point(&a, s, tau).dist(mobius_point(s, u)) < 1e-14);
            assert!(annulus_point(&a, s + TAU, 1.0 - tau).dist(mobius_point(s, u)) < 1e-14);
        }
    }

    #[test]
    fn mobius_examples() {
        assert!(mobius_point(0.0, 0.0).dist(Point3::new(SQRT_2, 0.0, 0.0)) < 1e-15);
        assert!(mobius_point(0.0, 1.0).dist(Point3::new(SQRT_2, 0.0, 1.0)) < 1e-15);
        for &(s, u) in &[(0.4f64, 0.7f64), (3.0, -0.2)] {
            assert!(mobius_point(s + TAU, u).dist(mobius_point(s, -u)) < 1e-14);
        }
    }

    #[test]
    fn k0_windings() {
        let (lon, mer) = windings(&TorusKnot::new(0.0).sample(512));
        assert_abs_diff_eq!(lon, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(mer, -1.0, epsilon = 1e-9);
    }
}
