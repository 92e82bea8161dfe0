use donut_eversion::donut::{embed_local, foliation_arc, torus_residual};
use donut_eversion::export::{parse_ply, ply_bytes};
use donut_eversion::geom::{rotate_z, sigma_min, Differential3x2, Point3};
use donut_eversion::mesh::SphereGrid;
use donut_eversion::s3::{dehn_twisted_chart, hopf_rotate, inverse_stereographic, stereographic, S3Point};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn point() -> impl Strategy<Value = Point3> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

fn s3_point() -> impl Strategy<Value = S3Point> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("away from zero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 0.01)
        .prop_map(|(a, b, c, d)| S3Point::normalized(Complex64::new(a, b), Complex64::new(c, d)))
}

proptest! {
    #[test]
    fn boundary_circle_lands_on_torus(theta in 0.0..2.0 * TAU, g in 0.0..TAU) {
        prop_assert!(torus_residual(embed_local(theta, g.cos(), g.sin())).abs() < 1e-12);
    }

    #[test]
    fn embed_local_twist_identification(theta in 0.0..TAU, x in -1.0..1.0f64, z in -1.0..1.0f64) {
        prop_assert!(embed_local(theta + TAU, x, z).dist(embed_local(theta, -x, -z)) < 1e-12);
    }

    #[test]
    fn sigma_is_rotation_invariant(du in point(), dv in point(), theta in 0.0..TAU) {
        let d = Differential3x2::new(du, dv);
        let a = sigma_min(&d);
        prop_assert!((sigma_min(&d.rotated_z(theta)) - a).abs() < 1e-12 * (1.0 + du.norm() * dv.norm()));
    }

    #[test]
    fn rotations_compose(p in point(), a in -PI..PI, b in -PI..PI) {
        prop_assert!(rotate_z(rotate_z(p, a), b).dist(rotate_z(p, a + b)) < 1e-12);
    }

    #[test]
    fn foliation_arc_ends_on_unit_circle(phi in 0.01..PI - 0.01) {
        let (x0, z0) = foliation_arc(phi, 0.0).unwrap();
        let (x1, z1) = foliation_arc(phi, 1.0).unwrap();
        prop_assert!((x0 - phi.cos()).abs() < 1e-9 && (z0 + phi.sin()).abs() < 1e-9);
        prop_assert!((x1 - phi.cos()).abs() < 1e-9 && (z1 - phi.sin()).abs() < 1e-9);
    }

    #[test]
    fn hopf_flow_is_a_norm_preserving_group(p in s3_point(), a in -TAU..TAU, b in -TAU..TAU) {
        prop_assert!((hopf_rotate(p, a).norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!(hopf_rotate(hopf_rotate(p, a), b).dist(&hopf_rotate(p, a + b)) < 1e-12);
    }

    #[test]
    fn twisted_chart_conjugates_flow(l in -PI..PI, r in 0.0..1.0f64, m in -PI..PI, t in -TAU..TAU) {
        prop_assert!(hopf_rotate(dehn_twisted_chart(l, r, m), t).dist(&dehn_twisted_chart(l + t, r, m)) < 1e-12);
    }

    #[test]
    fn stereographic_round_trip(x in point()) {
        let back = stereographic(inverse_stereographic(x)).unwrap();
        prop_assert!(back.dist(x) < 1e-10 * (1.0 + x.norm2()));
    }

    #[test]
    fn ply_round_trips_at_f32(nu in 2usize..12, nv in 3usize..16, r in 0.1..10.0f64) {
        let m = SphereGrid::new(nu, nv).mesh(|u, v| {
            let a = PI * u;
            Point3::new(r * a.sin() * v.cos(), r * a.sin() * v.sin(), r * a.cos())
        });
        let bytes = ply_bytes(&m);
        prop_assert_eq!(&bytes, &ply_bytes(&m));
        let back = parse_ply(&bytes).unwrap();
        prop_assert_eq!(&back.triangles, &m.triangles);
        for (a, b) in back.positions.iter().zip(&m.positions) {
            prop_assert_eq!(a.y, b.y as f32 as f64);
        }
    }
}
