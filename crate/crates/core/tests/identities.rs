use donut_eversion::certify::{double_cover_check, eversion_certificate, immersion_check, torus_windings};
use donut_eversion::disc::{build_disc, rotate_disc, DiscParams};
use donut_eversion::donut::{donut_embed, embed_local, mobius_point, DonutCoords};
use donut_eversion::export::{obj_string, parse_obj, write_mesh, MeshFormat};
use donut_eversion::geom::{accumulated_turns, numeric_differential, sigma_min, Differential3x2, Point3, SampledCurve};
use donut_eversion::mesh::{DiscGrid, SphereGrid, TriMesh};
use donut_eversion::pipeline::export_s3_figures;
use donut_eversion::s3::{dehn_twisted_coords, handle_disc, hopf_rotate, meridian_action, S3Point};
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2, TAU};

fn round_sphere(nu: usize, nv: usize) -> TriMesh {
    SphereGrid::new(nu, nv).mesh(|u, v| {
        let a = PI * u;
        Point3::new(a.sin() * v.cos(), a.sin() * v.sin(), a.cos())
    })
}

#[test]
fn donut_chart_differential_matches_analytic() {
    let (theta, r, phi) = (0.7, 0.4, 2.1);
    let f = |t: f64, p: f64| donut_embed(DonutCoords::new(t, r, p)).unwrap();
    let d = numeric_differential(f, theta, phi, 1e-5);
    let a = phi + 0.5 * theta;
    let rho = SQRT_2 + r * a.cos();
    let (s, c) = theta.sin_cos();
    let drho = -0.5 * r * a.sin();
    let dt = Point3::new(drho * c - rho * s, drho * s + rho * c, 0.5 * r * a.cos());
    let dp = Point3::new(-r * a.sin() * c, -r * a.sin() * s, r * a.cos());
    assert!(d.du.dist(dt) < 1e-6);
    assert!(d.dv.dist(dp) < 1e-6);
}

#[test]
fn meridian_and_compensated_longitude_windings() {
    let meridian = SampledCurve::sample(|p| embed_local(0.3, 1.02 * p.cos(), 1.02 * p.sin()), 0.0, TAU, 256, true);
    let (l, m) = torus_windings(&meridian);
    assert!(l.abs() < 1e-9 && (m.abs() - 1.0).abs() < 1e-9);
    let longitude = SampledCurve::sample(|t| donut_embed(DonutCoords::new(t, 1.0, -0.5 * t)).unwrap(), 0.0, TAU, 512, true);
    let (l, m) = torus_windings(&longitude);
    assert!((l - 1.0).abs() < 1e-9 && m.abs() < 1e-9);
}

#[test]
fn round_sphere_is_immersed_and_pinch_is_located() {
    let f = |u: f64, v: f64| {
        let a = PI * u;
        Point3::new(a.sin() * v.cos(), a.sin() * v.sin(), a.cos())
    };
    let params: Vec<(f64, f64)> = (1..16).flat_map(|i| (0..16).map(move |j| (i as f64 / 16.0, TAU * j as f64 / 16.0))).collect();
    let (s, _) = immersion_check(&params, |u, v| numeric_differential(f, u, v, 1e-6));
    assert!(s > 0.1);
    let pinch = |u: f64, v: f64| {
        let d = numeric_differential(f, u, v, 1e-6);
        if (u - 0.5).abs() < 1e-9 && v == 0.0 {
            Differential3x2::new(d.du, d.du * 2.0)
        } else {
            d
        }
    };
    let (s, at) = immersion_check(&params, pinch);
    assert!(s < 1e-12);
    assert_eq!(at, (0.5, 0.0));
}

#[test]
fn rotating_the_disc_preserves_sigma() {
    let d0 = build_disc(DiscParams::default(), DiscGrid::new(12, 48)).unwrap();
    let d1 = rotate_disc(&d0, 1.3);
    let same = rotate_disc(&d0, 0.0);
    for (rho, phi) in [(0.2, 0.4), (0.95, 3.0), (0.6, 5.5)] {
        assert_eq!(same.point(rho, phi), d0.point(rho, phi));
        let a = sigma_min(&d0.differential(rho, phi, 1e-6));
        let b = sigma_min(&d1.differential(rho, phi, 1e-6));
        assert!((a - b).abs() < 1e-9 * a.max(1.0));
    }
}

#[test]
fn mobius_annulus_is_exactly_two_to_one() {
    let (nu, nv) = (16u32, 96u32);
    let mut pos = Vec::new();
    let mut tris = Vec::new();
    for i in 0..=nu {
        for j in 0..nv {
            pos.push(mobius_point(2.0 * TAU * j as f64 / nv as f64, 0.9 * (2.0 * i as f64 / nu as f64 - 1.0)));
            if i < nu {
                let (a, b) = (i * nv + j, i * nv + (j + 1) % nv);
                tris.push([a, b, b + nv]);
                tris.push([a, b + nv, a + nv]);
            }
        }
    }
    let band = TriMesh::new(pos, tris);
    let mask = vec![true; band.triangles.len()];
    let inner: Vec<Point3> = band.positions[nv as usize..(nu * nv) as usize].to_vec();
    assert_eq!(double_cover_check(&band, &mask, &inner, 1e-3).fraction, 1.0);
}

#[test]
fn certificate_controls() {
    let s = round_sphere(24, 48);
    let same = eversion_certificate(&s, &s, 1e-3, -0.99);
    assert_eq!(same.hausdorff, 0.0);
    assert!(same.mean_normal_dot > 0.99 && !same.passed);
    let flipped = eversion_certificate(&s, &s.flipped(), 1e-3, -0.99);
    assert!(flipped.mean_normal_dot < -0.99 && flipped.passed);
}

#[test]
fn meridian_orbit_of_clifford_point() {
    let p = S3Point::new(Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0));
    for k in 0..12 {
        let psi = TAU * k as f64 / 12.0;
        let q = meridian_action(p, psi);
        assert!((q.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(q.alpha, p.alpha);
        assert!((q.beta - Complex64::from_polar(FRAC_1_SQRT_2, psi)).norm() < 1e-15);
    }
}

#[test]
fn handle_disc_meets_clifford_torus_orthogonally() {
    for k in 0..16 {
        let (psi, phi) = (0.3 * k as f64, TAU * k as f64 / 16.0);
        let p = handle_disc(psi, 1.0, phi);
        let h = 1e-6;
        let a = handle_disc(psi, 1.0 - h, phi).to_array();
        let b = p.to_array();
        let radial: Vec<f64> = (0..4).map(|i| (b[i] - a[i]) / h).collect();
        let ia = [-p.alpha.im, p.alpha.re, 0.0, 0.0];
        let ib = [0.0, 0.0, -p.beta.im, p.beta.re];
        for t in [ia, ib] {
            let dot: f64 = (0..4).map(|i| radial[i] * t[i]).sum();
            assert!(dot.abs() < 1e-6);
        }
    }
}

#[test]
fn pullback_windings_in_twisted_chart() {
    let turns = |f: &dyn Fn(f64) -> S3Point| {
        let c: Vec<(f64, f64, f64)> = (0..256).map(|k| dehn_twisted_coords(f(TAU * k as f64 / 256.0))).collect();
        (accumulated_turns(c.iter().map(|x| x.0), true), accumulated_turns(c.iter().map(|x| x.2), true))
    };
    let lambda = |t: f64| S3Point::new(Complex64::from_polar(FRAC_1_SQRT_2, t), Complex64::new(FRAC_1_SQRT_2, 0.0));
    let (l, m) = turns(&lambda);
    assert!((l - 1.0).abs() < 1e-9 && (m + 1.0).abs() < 1e-9);
    let p = S3Point::new(Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0));
    let (l, m) = turns(&|t| hopf_rotate(p, t));
    assert!((l - 1.0).abs() < 1e-9 && m.abs() < 1e-9);
}

#[test]
fn sphere_export_is_deterministic_and_closed() {
    let dir = tempfile::tempdir().unwrap();
    let m = round_sphere(64, 64);
    assert_eq!(m.positions.len(), 63 * 64 + 2);
    let back = parse_obj(&obj_string(&m)).unwrap();
    assert_eq!(back.euler_characteristic(), 2);
    for format in [MeshFormat::Obj, MeshFormat::Ply] {
        let a = dir.path().join(format!("a.{}", format.extension()));
        let b = dir.path().join(format!("b.{}", format.extension()));
        write_mesh(&m, format, &a).unwrap();
        write_mesh(&m, format, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}

#[test]
fn s3_figures_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let f = export_s3_figures(dir.path(), MeshFormat::Obj, 32).unwrap();
    assert!(f.clifford_fit_residual < 1e-9);
    assert!(f.alpha_core_deviation < 1e-12);
    for name in &f.files {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let circle = std::fs::read_to_string(dir.path().join("hopf_circle_0.obj")).unwrap();
    assert!(circle.lines().last().unwrap().ends_with(" 1"));
}
