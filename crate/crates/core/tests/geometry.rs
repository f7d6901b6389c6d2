use conewave::cone_geometry::*;
use proptest::prelude::*;
use std::f64::consts::PI;

const ANGLES: [f64; 6] = [PI / 2.0, PI, 2.0 * PI, 3.0 * PI, 4.0 * PI, 7.0];

fn cone_angle() -> impl Strategy<Value = ConeAngle> {
    prop::sample::select(ANGLES.to_vec()).prop_map(|a| ConeAngle::new(a).unwrap())
}

fn point(alpha: ConeAngle) -> impl Strategy<Value = ConePoint> {
    (0.05f64..5.0, 0.0f64..1.0).prop_map(move |(r, u)| ConePoint::new(alpha, r, u * alpha.value()).unwrap())
}

fn three_points() -> impl Strategy<Value = (ConeAngle, ConePoint, ConePoint, ConePoint)> {
    cone_angle().prop_flat_map(|a| (Just(a), point(a), point(a), point(a)))
}

fn sign() -> impl Strategy<Value = Sign> {
    prop::bool::ANY.prop_map(|b| if b { Sign::Plus } else { Sign::Minus })
}

proptest! {
    #[test]
    fn distance_is_a_metric((a, p, q, w) in three_points()) {
        let d = |x, y| cone_distance(a, x, y);
        prop_assert!((d(p, q) - d(q, p)).abs() < 1e-12);
        prop_assert!(d(p, p).abs() < 1e-12);
        prop_assert!(d(p, q) >= 0.0);
        prop_assert!(d(p, w) <= d(p, q) + d(q, w) + 1e-12);
    }

    #[test]
    fn full_angle_cone_is_the_plane(r1 in 0.05f64..5.0, t1 in 0.0f64..6.28, r2 in 0.05f64..5.0, t2 in 0.0f64..6.28) {
        let a = ConeAngle::new(2.0 * PI).unwrap();
        let d = cone_distance(a, ConePoint::new(a, r1, t1).unwrap(), ConePoint::new(a, r2, t2).unwrap());
        let planar = PlanarPoint::new(r1 * t1.cos(), r1 * t1.sin()).dist(PlanarPoint::new(r2 * t2.cos(), r2 * t2.sin()));
        prop_assert!((d - planar).abs() < 1e-12 * (1.0 + planar));
    }

    #[test]
    fn development_is_isometric((a, p, q, _w) in three_points(), eps in sign()) {
        let (Ok(x), Ok(y)) = (develop(a, eps, p), develop(a, eps, q)) else { return Ok(()) };
        prop_assert!((x.norm() - p.r).abs() < 1e-12 * (1.0 + p.r));
        let (tx, ty) = (chart_angle(eps, x), chart_angle(eps, y));
        let k = (tx - p.theta) / a.value();
        prop_assert!((k - k.round()).abs() < 1e-10);
        // The straight segment stays in the chart when the chart angles differ by the cone separation.
        let sep = angular_separation(a, p.theta, q.theta);
        if sep < PI && ((tx - ty).abs() - sep).abs() < 1e-10 {
            prop_assert!((x.dist(y) - cone_distance(a, p, q)).abs() < 1e-10);
        }
    }

    #[test]
    fn unshifted_vertex_gives_polar_coordinates((a, p, _q, _w) in three_points(), eps in sign()) {
        let Ok(x) = develop(a, eps, p) else { return Ok(()) };
        let (r, th) = shifted_vertex_coords(x, eps, 0.0).unwrap();
        prop_assert!((r - p.r).abs() < 1e-12 * (1.0 + p.r));
        prop_assert!((th - chart_angle(eps, x)).abs() < 1e-12);
    }

    #[test]
    fn shifted_radius_is_convex(x in -3.0f64..3.0, y in -3.0f64..3.0, eps in sign(), s in 0.0f64..2.0, ds in 1e-3f64..0.1) {
        let q = PlanarPoint::new(x, y);
        let r = |s: f64| shifted_vertex_coords(q, eps, s).map(|v| v.0);
        if let (Ok(a), Ok(b), Ok(c)) = (r(s), r(s + ds), r(s + 2.0 * ds)) {
            prop_assert!(a - 2.0 * b + c >= -1e-12);
        }
    }
}
