mod common;

use cctree::cc_paths::{cc_steer, Direction, Path, PathSegment};
use cctree::environment::{Aabb, CollisionChecker};
use cctree::geometry::Pose;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_pose(rng: &mut ChaCha8Rng, b: &Aabb) -> Pose {
    Pose::new(
        rng.gen_range(b.min_x..b.max_x),
        rng.gen_range(b.min_y..b.max_y),
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        0.0,
    )
}

#[test]
fn blocked_scenario_narrows_the_road() {
    let scn = common::load("perpendicular_blocked.scn");
    let goal = scn.spot.goal;
    let row_top = scn
        .obstacles
        .iter()
        .map(|o| o.aabb())
        .filter(|b| b.max_y < goal.y + 5.0 && b.min_y > 0.5)
        .map(|b| b.max_y)
        .fold(f64::NEG_INFINITY, f64::max);
    let across = scn
        .obstacles
        .iter()
        .map(|o| o.aabb())
        .filter(|b| b.min_y > row_top)
        .map(|b| b.min_y)
        .fold(f64::INFINITY, f64::min);
    assert!((across - row_top - 3.5).abs() < 1e-9, "road width {}", across - row_top);
}

#[test]
fn index_agrees_with_linear_scan() {
    let scn = common::load("perpendicular.scn");
    let obstacles = scn.effective_obstacles();
    let checkers: Vec<CollisionChecker> = [0.5, 2.0, 7.0]
        .iter()
        .map(|&c| CollisionChecker::new(scn.bounds, obstacles.clone(), c))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut blocked = 0;
    for _ in 0..100_000 {
        let p = random_pose(&mut rng, &scn.bounds);
        let reference = checkers[0].pose_free_unindexed(&scn.vehicle, &p);
        for c in &checkers {
            assert_eq!(c.pose_free(&scn.vehicle, &p), reference, "{p:?}");
        }
        blocked += usize::from(!reference);
    }
    assert!(blocked > 10_000 && blocked < 90_000);
}

#[test]
fn inflation_never_frees_a_pose() {
    let scn = common::load("parallel.scn");
    let margins = [0.0, 0.05, 0.2, 0.5];
    let checkers: Vec<CollisionChecker> = margins
        .iter()
        .map(|&m| {
            let obs = scn.obstacles.iter().map(|o| o.inflated(m)).collect();
            CollisionChecker::new(scn.bounds, obs, 2.0)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20_000 {
        let p = random_pose(&mut rng, &scn.bounds);
        let free: Vec<bool> = checkers.iter().map(|c| c.pose_free(&scn.vehicle, &p)).collect();
        for w in free.windows(2) {
            assert!(w[0] || !w[1], "inflating freed {p:?}");
        }
    }
}

#[test]
fn finer_collision_step_never_frees_a_path() {
    let scn = common::load("perpendicular.scn");
    let env = scn.collision_checker();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checked = 0;
    while checked < 500 {
        let a = random_pose(&mut rng, &scn.bounds);
        let b = random_pose(&mut rng, &scn.bounds);
        let Some(path) = cc_steer(a, b, &scn.vehicle) else {
            continue;
        };
        if path.is_empty() {
            continue;
        }
        checked += 1;
        let mut ds = 0.4;
        let mut prev = env.path_free(&scn.vehicle, &path, ds);
        for _ in 0..3 {
            ds *= 0.5;
            let now = env.path_free(&scn.vehicle, &path, ds);
            assert!(prev || !now, "halving the step freed a path");
            prev = now;
        }
    }
}

#[test]
fn random_paths_in_open_space_are_free() {
    let scn = common::load("empty.scn");
    let env = scn.collision_checker();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..1000 {
        let start = Pose::new(
            rng.gen_range(10.0..20.0),
            rng.gen_range(10.0..20.0),
            rng.gen_range(-3.0..3.0),
            0.0,
        );
        let dir = if rng.gen_bool(0.5) {
            Direction::Forward
        } else {
            Direction::Backward
        };
        let a = PathSegment::straight(start, rng.gen_range(0.0..2.0), dir);
        let b = PathSegment::arc(
            a.end_pose(),
            rng.gen_range(-1.0 / 6.0..1.0 / 6.0),
            rng.gen_range(0.0..3.0),
            dir,
        );
        let path = Path::from_segments([a, b]);
        assert!(env.path_free(&scn.vehicle, &path, 0.1));
    }
    let parked = Path::from_segments([PathSegment::straight(scn.spot.goal, 0.0, Direction::Forward)]);
    assert!(env.path_free(&scn.vehicle, &parked, 0.1));
}
