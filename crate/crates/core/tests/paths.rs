mod common;

use cctree::cc_paths::{
    cc_steer, clothoid_endpoint, fresnel, path_curvature_profile, path_length, CcSteer, Direction, Path, PathSegment,
    SegmentKind,
};
use cctree::geometry::{Pose, VehicleParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn fresnel_of_one_matches_quadrature() {
    let (c, s) = common::fresnel_quadrature(1.0);
    assert!((c - 0.779_893_400_376_822_8).abs() < 1e-10);
    assert!((s - 0.438_259_147_390_354_8).abs() < 1e-10);
    let (fc, fs) = fresnel(1.0);
    assert!((fc - c).abs() < 1e-10 && (fs - s).abs() < 1e-10);
    let (nc, ns) = fresnel(-1.0);
    assert_eq!((nc, ns), (-fc, -fs));
}

#[test]
fn fresnel_tracks_quadrature_on_a_grid() {
    for i in 0..200 {
        let x = 10f64.powf(-3.0 + 4.0 * i as f64 / 199.0);
        let (c, s) = common::fresnel_quadrature(x);
        let (fc, fs) = fresnel(x);
        assert!((fc - c).abs() <= 1e-8 && (fs - s).abs() <= 1e-8, "x = {x}");
    }
}

#[test]
fn clothoid_endpoint_matches_integration() {
    for i in 0..6 {
        for j in 0..6 {
            let sigma = 0.05 + 0.03 * i as f64;
            let kappa = 0.02 + (1.0 / 6.0 - 0.02) * j as f64 / 5.0;
            let p = clothoid_endpoint(sigma, kappa).unwrap();
            let (x, y, th) = common::rk4_clothoid(0.0, sigma, kappa / sigma, 1e-4);
            assert!((p.x - x).abs() < 1e-6 && (p.y - y).abs() < 1e-6, "σ {sigma} κ {kappa}");
            assert!((p.theta - th).abs() < 1e-8);
            assert!((p.theta - kappa * kappa / (2.0 * sigma)).abs() < 1e-15);
        }
    }
}

#[test]
fn reference_clothoid_values() {
    let p = clothoid_endpoint(0.2, 1.0 / 6.0).unwrap();
    let (x, y, _) = common::rk4_clothoid(0.0, 0.2, 5.0 / 6.0, 1e-4);
    assert!((p.x - x).abs() < 1e-9 && (p.y - y).abs() < 1e-9);
    assert!((p.x - 0.832_931_545).abs() < 1e-8);
    assert!((p.y - 0.019_283_480).abs() < 1e-8);
    assert!((p.theta - 0.069_444_444_444).abs() < 1e-11);
    let m = clothoid_endpoint(-0.2, -1.0 / 6.0).unwrap();
    assert_eq!((m.x, m.y, m.theta, m.kappa), (p.x, -p.y, -p.theta, -p.kappa));
}

fn random_segment(rng: &mut ChaCha8Rng, start: Pose) -> PathSegment {
    let dir = if rng.gen_bool(0.5) {
        Direction::Forward
    } else {
        Direction::Backward
    };
    let start = start.with_kappa(0.0);
    match rng.gen_range(0..3) {
        0 => PathSegment::straight(start, rng.gen_range(0.1..5.0), dir),
        1 => PathSegment::arc(
            start,
            rng.gen_range(-1.0 / 6.0..1.0 / 6.0),
            rng.gen_range(0.1..5.0),
            dir,
        ),
        _ => {
            let sigma: f64 = rng.gen_range(0.05..0.2);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            PathSegment::clothoid(start, 0.0, sign * sigma, rng.gen_range(0.05..(1.0 / 6.0) / sigma), dir)
        }
    }
}

#[test]
fn sampling_ends_on_closed_form_endpoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let start = Pose::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-3.0..3.0),
            0.0,
        );
        let seg = random_segment(&mut rng, start);
        let last = seg.sample(0.07).last().unwrap().1;
        assert!(last.approx_eq(&seg.end_pose(), 1e-9));
        if seg.kind == SegmentKind::Clothoid && seg.direction == Direction::Forward {
            let local = clothoid_endpoint(seg.sigma, seg.end_kappa()).unwrap();
            let world = cctree::geometry::compose(start, local);
            assert!(world.approx_eq(&seg.end_pose(), 1e-9));
        }
    }
}

/// Targets reached by a single continuous-curvature turn from the origin.
#[test]
fn steer_reconnects_generated_turns() {
    let params = VehicleParams::default();
    let steer = CcSteer::new(&params, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (kmax, smax) = (params.kappa_max, params.sigma_max);
    for _ in 0..1000 {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let dir = if rng.gen_bool(0.5) {
            Direction::Forward
        } else {
            Direction::Backward
        };
        let arc = rng.gen_range(0.0..6.0);
        let a = PathSegment::clothoid(Pose::identity(), 0.0, sign * smax, kmax / smax, dir);
        let b = PathSegment::arc(a.end_pose(), sign * kmax, arc, dir);
        let c = PathSegment::clothoid(b.end_pose(), sign * kmax, -sign * smax, kmax / smax, dir);
        let generator = Path::from_segments([a, b, c]);
        let target = generator.end_pose().unwrap().with_kappa(0.0);
        let path = steer.steer(Pose::identity(), target).expect("reachable target");
        assert!(
            path.length() <= 1.001 * generator.length(),
            "{} vs {}",
            path.length(),
            generator.length()
        );
        assert!(path.end_pose().unwrap().approx_eq(&target, 1e-6));
        path.validate(&params, 0.05, 1e-6).unwrap();
    }
}

#[test]
fn steer_reaches_ends_of_random_paths() {
    let params = VehicleParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut reached = 0;
    for _ in 0..300 {
        let mut p = Path::new();
        let mut pose = Pose::identity();
        for _ in 0..rng.gen_range(1..4) {
            let seg = random_segment(&mut rng, pose);
            pose = seg.end_pose();
            p.push(seg);
        }
        let target = pose.with_kappa(0.0);
        if let Some(path) = cc_steer(Pose::identity(), target, &params) {
            reached += 1;
            let end = path.end_pose().unwrap_or(Pose::identity());
            assert!(end.approx_eq(&target, 1e-6));
            assert!(path.direction_switches() <= 2);
            path.validate(&params, 0.05, 1e-6).unwrap();
        }
    }
    assert!(reached >= 290, "only {reached} of 300 targets reached");
}

#[test]
fn steering_identities() {
    let params = VehicleParams::default();
    let p = Pose::new(3.0, -2.0, 0.4, 0.0);
    assert_eq!(path_length(&cc_steer(p, p, &params).unwrap()), 0.0);
    let straight = cc_steer(Pose::identity(), Pose::new(10.0, 0.0, 0.0, 0.0), &params).unwrap();
    assert_eq!(straight.segments.len(), 1);
    assert_eq!(straight.segments[0].kind, SegmentKind::Straight);
    assert!((straight.length() - 10.0).abs() < 1e-12);
}

#[test]
fn branch_prefix_length_and_profile() {
    let s = PathSegment::straight(Pose::identity(), 2.0, Direction::Forward);
    let c = PathSegment::clothoid(s.end_pose(), 0.0, 0.2, 5.0 / 6.0, Direction::Forward);
    let p = Path::from_segments([s, c]);
    assert!((path_length(&p) - 2.833_333_333_333).abs() < 1e-9);
    for (st, k) in path_curvature_profile(&Path::from_segments([c]), 0.01) {
        assert!((k - 0.2 * st).abs() < 1e-12);
    }
    assert_eq!(path_length(&Path::new()), 0.0);
}
