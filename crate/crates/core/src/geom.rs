//! Small fixed-size geometry: points, 3x2 differentials, sampled curves.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub type Vec3 = Point3;

impl Point3 {
    pub const ZERO: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn normalized(self) -> Point3 {
        let n = self.norm();
        if n > 0.0 {
            self / n
        } else {
            self
        }
    }

    #[inline]
    pub fn dist(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn lerp(self, o: Point3, t: f64) -> Point3 {
        self + (o - self) * t
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Distance from the z-axis.
    #[inline]
    pub fn rho(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl Add for Point3 {
    type Output = Point3;
    #[inline]
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    #[inline]
    fn add_assign(&mut self, o: Point3) {
        self.x += o.x;
        self.y += o.y;
        self.z += o.z;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    #[inline]
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    #[inline]
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Point3> for f64 {
    type Output = Point3;
    #[inline]
    fn mul(self, p: Point3) -> Point3 {
        p * self
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    #[inline]
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    #[inline]
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// Rotation about the z-axis, anticlockwise seen from +z.
#[inline]
pub fn rotate_z(p: Point3, theta: f64) -> Point3 {
    let (s, c) = theta.sin_cos();
    Point3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z)
}

/// The two partial derivatives of a surface chart at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Differential3x2 {
    pub du: Vec3,
    pub dv: Vec3,
}

impl Differential3x2 {
    pub fn new(du: Vec3, dv: Vec3) -> Self {
        Differential3x2 { du, dv }
    }

    pub fn normal(&self) -> Vec3 {
        self.du.cross(self.dv)
    }

    pub fn rotated_z(&self, theta: f64) -> Self {
        Differential3x2::new(rotate_z(self.du, theta), rotate_z(self.dv, theta))
    }
}

/// Least singular value of the 3x2 matrix `[du dv]`.
///
/// Eigenvalues of the Gram matrix in closed form. The smaller root is
/// evaluated as det / larger to avoid cancellation.
pub fn sigma_min(d: &Differential3x2) -> f64 {
    let a = d.du.norm2();
    let b = d.du.dot(d.dv);
    let c = d.dv.norm2();
    let tr = a + c;
    if tr <= 0.0 {
        return 0.0;
    }
    let det = d.du.cross(d.dv).norm2();
    let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
    let big = 0.5 * (tr + disc);
    let small = if big > 0.0 { det / big } else { 0.0 };
    small.max(0.0).sqrt()
}

pub const DEFAULT_FD_STEP: f64 = 1e-5;

pub fn numeric_differential<F>(f: F, u: f64, v: f64, h: f64) -> Differential3x2
where
    F: Fn(f64, f64) -> Point3,
{
    let du = (f(u + h, v) - f(u - h, v)) / (2.0 * h);
    let dv = (f(u, v + h) - f(u, v - h)) / (2.0 * h);
    Differential3x2::new(du, dv)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    pub points: Vec<Point3>,
    pub params: Vec<f64>,
    pub closed: bool,
}

impl SampledCurve {
    /// Samples `f` at `n` uniformly spaced parameters of `[t0, t1)`; for a
    /// closed curve the endpoint is not repeated.
    pub fn sample<F: Fn(f64) -> Point3>(f: F, t0: f64, t1: f64, n: usize, closed: bool) -> Self {
        let denom = if closed { n as f64 } else { (n.max(2) - 1) as f64 };
        let params: Vec<f64> = (0..n).map(|i| t0 + (t1 - t0) * i as f64 / denom).collect();
        let points = params.iter().map(|&t| f(t)).collect();
        SampledCurve { points, params, closed }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point3, Point3)> + '_ {
        let n = self.points.len();
        let m = if self.closed { n } else { n.saturating_sub(1) };
        (0..m).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    pub fn max_edge(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).fold(0.0, f64::max)
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn map<F: Fn(Point3) -> Point3>(&self, f: F) -> Self {
        SampledCurve {
            points: self.points.iter().map(|&p| f(p)).collect(),
            params: self.params.clone(),
            closed: self.closed,
        }
    }
}

/// Winding of a planar angle sequence: accumulated principal increments / 2π.
pub fn accumulated_turns(angles: impl IntoIterator<Item = f64>, closed: bool) -> f64 {
    let a: Vec<f64> = angles.into_iter().collect();
    if a.len() < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    let m = if closed { a.len() } else { a.len() - 1 };
    for i in 0..m {
        total += wrap_pi(a[(i + 1) % a.len()] - a[i]);
    }
    total / std::f64::consts::TAU
}

/// Maps an angle to (−π, π].
#[inline]
pub fn wrap_pi(a: f64) -> f64 {
    let t = std::f64::consts::TAU;
    let mut r = a.rem_euclid(t);
    if r > std::f64::consts::PI {
        r -= t;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn close(a: Point3, b: Point3, tol: f64) -> bool {
        a.dist(b) < tol
    }

    #[test]
    fn rotate_quarter_turn() {
        assert!(close(rotate_z(Point3::new(1.0, 0.0, 0.0), FRAC_PI_2), Point3::new(0.0, 1.0, 0.0), 1e-15));
    }

    #[test]
    fn rotate_half_turn_of_outer_point() {
        let p = rotate_z(Point3::new(SQRT_2 + 1.0, 0.0, 0.0), PI);
        assert!(close(p, Point3::new(-SQRT_2 - 1.0, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn rotate_zero_is_identity() {
        let p = Point3::new(0.3, -1.2, 4.0);
        assert_eq!(rotate_z(p, 0.0), p);
    }

    #[test]
    fn sigma_min_examples() {
        let e1 = Point3::new(1.0, 0.0, 0.0);
        let e2 = Point3::new(0.0, 1.0, 0.0);
        assert!((sigma_min(&Differential3x2::new(e1, e2)) - 1.0).abs() < 1e-15);
        assert!(sigma_min(&Differential3x2::new(e1, e1)).abs() < 1e-15);
        let d = Differential3x2::new(e1 * 2.0, e2 * 3.0);
        assert!((sigma_min(&d) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sigma_min_sheared() {
        // [[1,1],[0,1],[0,0]] has singular values (3 ± √5)/2 under sqrt
        let d = Differential3x2::new(Point3::new(1.0, 0.0, 0.0), Point3::new(1.0, 1.0, 0.0));
        let expect = ((3.0 - 5f64.sqrt()) / 2.0).sqrt();
        assert!((sigma_min(&d) - expect).abs() < 1e-14);
    }

    #[test]
    fn numeric_differential_linear_and_quadratic() {
        let d = numeric_differential(|u, v| Point3::new(u, v, 0.0), 0.7, -0.2, 1e-5);
        assert!(close(d.du, Point3::new(1.0, 0.0, 0.0), 1e-9));
        assert!(close(d.dv, Point3::new(0.0, 1.0, 0.0), 1e-9));
        let d = numeric_differential(|u, v| Point3::new(u * u, v, 0.0), 1.0, 0.0, 1e-5);
        assert!(close(d.du, Point3::new(2.0, 0.0, 0.0), 1e-9));
    }

    #[test]
    fn wrap_and_turns() {
        assert!((wrap_pi(3.0 * PI) - PI).abs() < 1e-12);
        let angles = (0..100).map(|i| 2.0 * std::f64::consts::TAU * i as f64 / 100.0);
        assert!((accumulated_turns(angles, true) - 2.0).abs() < 1e-12);
    }
}
