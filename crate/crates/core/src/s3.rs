//! The unit 3-sphere in C², the Hopf flow, the Clifford torus and the
//! stereographic picture of the two complementary solid tori.

use crate::donut::foliation_arc;
use crate::error::{Error, Result};
use crate::geom::Point3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S3Point {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl S3Point {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        S3Point { alpha, beta }
    }

    /// Scales an arbitrary nonzero pair onto the sphere.
    pub fn normalized(alpha: Complex64, beta: Complex64) -> Self {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        S3Point::new(alpha / n, beta / n)
    }

    /// Point (e^{iφ}, e^{iψ})/√2 of the Clifford torus.
    pub fn clifford(c: CliffordCoords) -> Self {
        S3Point::new(
            Complex64::from_polar(FRAC_1_SQRT_2, c.phi),
            Complex64::from_polar(FRAC_1_SQRT_2, c.psi),
        )
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.alpha.re, self.alpha.im, self.beta.re, self.beta.im]
    }

    pub fn dist(&self, o: &S3Point) -> f64 {
        ((self.alpha - o.alpha).norm_sqr() + (self.beta - o.beta).norm_sqr()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CliffordCoords {
    pub phi: f64,
    pub psi: f64,
}

/// A point of RP³ held by its canonical lift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RP3Point {
    pub rep: S3Point,
}

pub fn hopf_rotate(p: S3Point, theta: f64) -> S3Point {
    if theta == std::f64::consts::PI {
        return antipodal(p);
    }
    let e = Complex64::from_polar(1.0, theta);
    S3Point::new(e * p.alpha, e * p.beta)
}

pub fn antipodal(p: S3Point) -> S3Point {
    S3Point::new(-p.alpha, -p.beta)
}

/// Rotates the second coordinate only; fixes the circle β = 0.
pub fn meridian_action(p: S3Point, psi: f64) -> S3Point {
    S3Point::new(p.alpha, Complex64::from_polar(1.0, psi) * p.beta)
}

/// Projection from the pole β = 1 onto the hyperplane x₃ = 0.
pub fn stereographic(p: S3Point) -> Result<Point3> {
    let d = 1.0 - p.beta.re;
    if d.abs() < 1e-14 {
        return Err(Error::PointAtInfinity);
    }
    Ok(Point3::new(p.alpha.re / d, p.alpha.im / d, p.beta.im / d))
}

pub fn inverse_stereographic(x: Point3) -> S3Point {
    let n2 = x.norm2();
    let d = 1.0 + n2;
    S3Point::new(
        Complex64::new(2.0 * x.x / d, 2.0 * x.y / d),
        Complex64::new((n2 - 1.0) / d, 2.0 * x.z / d),
    )
}

/// Meridian disc of the β-core solid torus at level `psi`.
///
/// `rho` in [0,1] runs from the β-core (ρ = 0) to the Clifford torus, and
/// `phi` is the polar angle in the disc.
pub fn handle_disc(psi: f64, rho: f64, phi: f64) -> S3Point {
    let a = rho * FRAC_1_SQRT_2;
    let b = (1.0 - a * a).max(0.0).sqrt();
    S3Point::new(Complex64::from_polar(a, phi), Complex64::from_polar(b, psi))
}

/// Chart of the α-core solid torus in which the Hopf flow is translation
/// of the longitude `l`.
pub fn dehn_twisted_chart(l: f64, r: f64, m: f64) -> S3Point {
    let b = r * FRAC_1_SQRT_2;
    let a = (1.0 - b * b).max(0.0).sqrt();
    S3Point::new(Complex64::from_polar(a, l), Complex64::from_polar(b, m + l))
}

/// Inverse of [`dehn_twisted_chart`]: (longitude, radius, meridian).
pub fn dehn_twisted_coords(p: S3Point) -> (f64, f64, f64) {
    let l = p.alpha.arg();
    let r = p.beta.norm() * std::f64::consts::SQRT_2;
    (l, r, p.beta.arg() - l)
}

/// Canonical lift: the first nonzero real coordinate is made positive.
pub fn rp3_quotient(p: S3Point) -> RP3Point {
    let sign = p
        .to_array()
        .iter()
        .find(|c| c.abs() > 1e-15)
        .map(|c| c.signum())
        .unwrap_or(1.0);
    RP3Point { rep: S3Point::new(p.alpha * sign, p.beta * sign) }
}

/// Least-squares torus of revolution about the z-axis: returns
/// (R, r, max residual of |(ρ−R)² + z² − r²|).
pub fn fit_torus_of_revolution(points: &[Point3]) -> (f64, f64, f64) {
    // (ρ−R)² + z² = r²  ⇔  ρ² + z² = 2Rρ + (r² − R²), linear in (2R, r² − R²)
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let rho = p.rho();
        let y = rho * rho + p.z * p.z;
        s11 += rho * rho;
        s12 += rho;
        s22 += 1.0;
        b1 += rho * y;
        b2 += y;
    }
    let det = s11 * s22 - s12 * s12;
    let a = (b1 * s22 - b2 * s12) / det;
    let c = (s11 * b2 - s12 * b1) / det;
    let big_r = 0.5 * a;
    let small_r = (c + big_r * big_r).max(0.0).sqrt();
    let res = points
        .iter()
        .map(|p| {
            let d = p.rho() - big_r;
            (d * d + p.z * p.z - small_r * small_r).abs()
        })
        .fold(0.0, f64::max);
    (big_r, small_r, res)
}

/// Sphere S^h_θ: two Hopf-rotated handle discs joined by an annulus in
/// the α-core solid torus with circular-arc meridian profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfSphere {
    pub theta: f64,
}

impl HopfSphere {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(Error::LevelOutOfRange(theta));
        }
        Ok(HopfSphere { theta })
    }

    /// Upper (+θ) disc; `rho` = 1 is its boundary on the Clifford torus.
    pub fn disc(&self, sign: f64, rho: f64, phi: f64) -> S3Point {
        hopf_rotate(handle_disc(0.0, rho, phi), sign * self.theta)
    }

    /// Annulus from the +θ boundary circle (τ = 0) to the −θ one (τ = 1).
    pub fn annulus(&self, tau: f64, phi: f64) -> S3Point {
        let (x, z) = foliation_arc(self.theta, 1.0 - tau).expect("level checked");
        let beta = Complex64::new(x, z) * FRAC_1_SQRT_2;
        let l = phi + self.theta * (1.0 - 2.0 * tau);
        let a = (1.0 - beta.norm_sqr()).max(0.0).sqrt();
        S3Point::new(Complex64::from_polar(a, l), beta)
    }

    /// Whole sphere over u in [0,1] (pole to pole) and phi; caps take
    /// u in [0,1/3] and [2/3,1].
    pub fn point(&self, u: f64, phi: f64) -> S3Point {
        if u <= 1.0 / 3.0 {
            self.disc(1.0, 3.0 * u, phi)
        } else if u >= 2.0 / 3.0 {
            self.disc(-1.0, 3.0 * (1.0 - u), phi)
        } else {
            self.annulus(3.0 * u - 1.0, phi)
        }
    }
}

pub fn hopf_sphere_family(theta: f64, nu: usize, nv: usize) -> Result<Vec<Vec<S3Point>>> {
    let s = HopfSphere::new(theta)?;
    Ok((0..=nu)
        .map(|i| {
            let u = i as f64 / nu as f64;
            (0..nv)
                .map(|j| s.point(u, std::f64::consts::TAU * j as f64 / nv as f64))
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn p() -> S3Point {
        S3Point::normalized(Complex64::new(0.3, -0.7), Complex64::new(0.2, 0.6))
    }

    #[test]
    fn hopf_half_turn_is_antipodal() {
        let q = p();
        assert_eq!(hopf_rotate(q, PI), antipodal(q));
        assert_eq!(hopf_rotate(q, 0.0), q);
    }

    #[test]
    fn clifford_orbit_stays_on_torus() {
        let base = S3Point::clifford(CliffordCoords { phi: 0.0, psi: 0.0 });
        for k in 0..32 {
            let q = hopf_rotate(base, TAU * k as f64 / 32.0);
            assert!((q.alpha.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
            assert!((q.beta.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn meridian_action_fixes_alpha_core() {
        let q = S3Point::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(meridian_action(q, 1.3), q);
        assert!((meridian_action(p(), 2.1).norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stereographic_examples() {
        let a = stereographic(S3Point::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))).unwrap();
        assert_eq!(a, Point3::new(1.0, 0.0, 0.0));
        let b = stereographic(S3Point::new(Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0))).unwrap();
        assert_eq!(b, Point3::new(0.0, 0.0, 0.0));
        let pole = S3Point::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        assert!(stereographic(pole).is_err());
        let x = Point3::new(0.4, -1.1, 2.3);
        assert!(stereographic(inverse_stereographic(x)).unwrap().dist(x) < 1e-14);
    }

    #[test]
    fn handle_disc_boundary_on_clifford_torus() {
        let q = handle_disc(0.7, 1.0, 2.0);
        assert!((q.alpha.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        let c = handle_disc(0.7, 0.0, 2.0);
        assert!((c.beta - Complex64::from_polar(1.0, 0.7)).norm() < 1e-15);
    }

    #[test]
    fn twisted_chart_conjugates_hopf_flow() {
        for &(l, r, m, t) in &[(0.1, 0.3, 2.0, 0.9), (3.0, 1.0, -1.0, 4.0), (-2.0, 0.0, 0.5, 1.0)] {
            let a = hopf_rotate(dehn_twisted_chart(l, r, m), t);
            let b = dehn_twisted_chart(l + t, r, m);
            assert!(a.dist(&b) < 1e-12);
        }
    }

    #[test]
    fn rp3_identifies_antipodes() {
        let q = p();
        assert_eq!(rp3_quotient(q), rp3_quotient(antipodal(q)));
    }

    #[test]
    fn hopf_sphere_quarter_turn_discs_swap() {
        let s = HopfSphere::new(FRAC_PI_2).unwrap();
        let a = antipodal(s.disc(1.0, 0.4, 1.1));
        let b = s.disc(-1.0, 0.4, 1.1);
        assert!(a.dist(&b) < 1e-15);
        assert!(HopfSphere::new(0.0).is_err());
    }

    #[test]
    fn hopf_sphere_seams_match() {
        let s = HopfSphere::new(1.0).unwrap();
        for k in 0..8 {
            let phi = k as f64;
            assert!(s.disc(1.0, 1.0, phi).dist(&s.annulus(0.0, phi)) < 1e-14);
            assert!(s.disc(-1.0, 1.0, phi).dist(&s.annulus(1.0, phi)) < 1e-14);
        }
    }
}
