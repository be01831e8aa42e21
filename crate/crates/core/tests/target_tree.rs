mod common;

use cctree::cc_paths::{clothoid_endpoint, Direction, PathViolation, SegmentKind};
use cctree::environment::{Aabb, CollisionChecker, ConvexPolygon, ParkingMode};
use cctree::error::TreeError;
use cctree::geometry::{Pose, VehicleParams};
use cctree::io::tree_to_csv;
use cctree::target_tree::{
    build_parallel_tree, build_perpendicular_tree, check_spot, compute_reference_extents, initialize_target_tree,
    tree_cost, TargetTree, TreeConfig, TreeStyle,
};

fn open_space(obstacles: Vec<ConvexPolygon>) -> CollisionChecker {
    CollisionChecker::new(Aabb::new(-50.0, -50.0, 50.0, 50.0), obstacles, 2.0)
}

fn perpendicular(env: &CollisionChecker, l: f64, style: TreeStyle) -> TargetTree {
    build_perpendicular_tree(
        Pose::identity(),
        l,
        env,
        &VehicleParams::default(),
        &TreeConfig::default(),
        style,
    )
}

/// Tip of the sharpest branch: clothoid to full lock, then an arc to a
/// quarter turn.
fn sharpest_tip(params: &VehicleParams) -> (f64, f64) {
    let k = params.kappa_max;
    let c = clothoid_endpoint(params.sigma_max, k).unwrap();
    let (cx, cy) = (c.x - c.theta.sin() / k, c.y + c.theta.cos() / k);
    (cx + 1.0 / k, cy)
}

/// Tip of a swept branch by numerical integration: clothoid until full lock
/// or the turn limit, then an arc to the turn limit.
fn integrated_tip(params: &VehicleParams, sigma: f64, turn: f64) -> (f64, f64) {
    let a = sigma.abs();
    let len = (params.kappa_max / a).min((2.0 * turn / a).sqrt());
    let (x, y, th) = common::rk4_clothoid(0.0, a, len, 1e-4);
    let rest = turn - th;
    let (x, y) = if rest > 1e-12 {
        let r = 1.0 / params.kappa_max;
        (
            x + r * ((th + rest).sin() - th.sin()),
            y + r * (th.cos() - (th + rest).cos()),
        )
    } else {
        (x, y)
    };
    (x, y * sigma.signum())
}

#[test]
fn open_space_branch_structure() {
    let env = open_space(vec![]);
    let t = perpendicular(&env, 2.0, TreeStyle::Continuous);
    assert_eq!(t.branches.len(), 9);
    assert_eq!(t.cost, 0.0);
    let left = t.branches.iter().find(|b| b.branch_sigma == 0.2).unwrap();
    let kinds: Vec<SegmentKind> = left.path.segments.iter().map(|s| s.kind).collect();
    assert_eq!(
        kinds,
        vec![SegmentKind::Straight, SegmentKind::Clothoid, SegmentKind::Arc]
    );
    let segs = &left.path.segments;
    assert_eq!(segs[0].length, 2.0);
    assert!((segs[1].length - 5.0 / 6.0).abs() < 1e-12);
    assert_eq!(segs[1].sigma, 0.2);
    assert!((segs[2].start_kappa - 1.0 / 6.0).abs() < 1e-15);
    assert!(segs.iter().all(|s| s.direction == Direction::Forward));
    assert!(t.branches.iter().all(|b| !b.truncated_by_collision));
    let (x, y) = sharpest_tip(&VehicleParams::default());
    assert!((left.tip_local.x - x).abs() < 1e-9 && (left.tip_local.y - y).abs() < 1e-9);
}

#[test]
fn zero_straight_starts_turning_at_goal() {
    let env = open_space(vec![]);
    let t = perpendicular(&env, 0.0, TreeStyle::Continuous);
    for b in t.branches.iter().filter(|b| b.branch_sigma != 0.0) {
        assert_eq!(b.path.segments[0].kind, SegmentKind::Clothoid);
        assert!(b.path.start_pose().unwrap().approx_eq(&Pose::identity(), 1e-12));
    }
}

#[test]
fn wall_at_exit_truncates_everything() {
    let params = VehicleParams::default();
    let front = params.body_length - params.rear_overhang;
    let wall = ConvexPolygon::rectangle(front + 0.05, -20.0, front + 1.0, 20.0);
    let t = perpendicular(&open_space(vec![wall]), 2.0, TreeStyle::Continuous);
    assert!(!t.branches.is_empty());
    assert!(t.branches.iter().all(|b| b.truncated_by_collision));
    assert_eq!(t.cost, 1.0);
}

#[test]
fn one_blocked_side_halves_the_coverage() {
    let p = VehicleParams::default();
    let flank = ConvexPolygon::rectangle(3.0, -10.0, 40.0, -(0.5 * p.body_width + 5e-4));
    let t = perpendicular(&open_space(vec![flank]), 0.0, TreeStyle::Continuous);
    assert_eq!(t.cost, 0.5);
    for b in &t.branches {
        assert_eq!(b.truncated_by_collision, b.branch_sigma < 0.0);
    }
}

#[test]
fn reference_extents() {
    let params = VehicleParams::default();
    let cfg = TreeConfig::default();
    let (l_max, w_max) = compute_reference_extents(&params, &cfg, TreeStyle::Continuous);
    let (mut lx, mut wy) = (0.0f64, 0.0f64);
    for k in 0..cfg.n_branches {
        let sigma = -params.sigma_max + 2.0 * params.sigma_max * k as f64 / (cfg.n_branches - 1) as f64;
        if sigma == 0.0 {
            continue;
        }
        let (x, y) = integrated_tip(&params, sigma, cfg.max_turn_angle);
        lx = lx.max(x.abs());
        wy = wy.max(y.abs());
    }
    assert!(
        (l_max - lx).abs() < 1e-6 && (w_max - wy).abs() < 1e-6,
        "{l_max} {w_max} vs {lx} {wy}"
    );

    let flat = TreeConfig {
        max_turn_angle: 1e-6,
        ..cfg
    };
    assert!(compute_reference_extents(&params, &flat, TreeStyle::Continuous).1 < 1e-3);

    let sharp = VehicleParams {
        sigma_max: 2.0,
        ..params
    };
    let wide = VehicleParams {
        kappa_max: 1.0 / 12.0,
        ..sharp
    };
    let (l1, w1) = compute_reference_extents(&sharp, &cfg, TreeStyle::Continuous);
    let (l2, w2) = compute_reference_extents(&wide, &cfg, TreeStyle::Continuous);
    assert!((l2 / l1 - 2.0).abs() < 0.05, "{}", l2 / l1);
    assert!((w2 / w1 - 2.0).abs() < 0.05, "{}", w2 / w1);
}

#[test]
fn min_cost_search_in_open_space_keeps_zero_straight() {
    let env = open_space(vec![]);
    let s = initialize_target_tree(
        ParkingMode::Perpendicular,
        Pose::identity(),
        5.5,
        &env,
        &VehicleParams::default(),
        &TreeConfig::default(),
        TreeStyle::Continuous,
    )
    .unwrap();
    assert!(s.evaluated.iter().all(|&(_, c)| c == 0.0));
    assert_eq!(s.evaluated.len(), 29);
    assert_eq!(s.tree.straight_length_l, 0.0);

    let coarse = TreeConfig {
        alpha: 5.5,
        ..TreeConfig::default()
    };
    let s = initialize_target_tree(
        ParkingMode::Perpendicular,
        Pose::identity(),
        5.5,
        &env,
        &VehicleParams::default(),
        &coarse,
        TreeStyle::Continuous,
    )
    .unwrap();
    let ls: Vec<f64> = s.evaluated.iter().map(|e| e.0).collect();
    assert_eq!(ls, vec![0.0, 5.5]);
}

fn scenario_tree(name: &str, l: Option<f64>) -> (cctree::environment::Scenario, TargetTree) {
    let scn = common::load(name);
    let env = scn.collision_checker();
    let cfg = scn.planner.tree_config();
    let tree = match l {
        None => {
            initialize_target_tree(
                scn.spot.mode,
                scn.spot.goal,
                scn.spot.length,
                &env,
                &scn.vehicle,
                &cfg,
                TreeStyle::Continuous,
            )
            .unwrap()
            .tree
        }
        Some(l) => match scn.spot.mode {
            ParkingMode::Perpendicular => {
                build_perpendicular_tree(scn.spot.goal, l, &env, &scn.vehicle, &cfg, TreeStyle::Continuous)
            }
            ParkingMode::Parallel => {
                build_parallel_tree(scn.spot.goal, l, &env, &scn.vehicle, &cfg, TreeStyle::Continuous).unwrap()
            }
        },
    };
    (scn, tree)
}

#[test]
fn blocked_road_prefers_a_longer_straight() {
    let (_, best) = scenario_tree("perpendicular_blocked.scn", None);
    let (_, zero) = scenario_tree("perpendicular_blocked.scn", Some(0.0));
    assert!(best.straight_length_l > 0.0);
    assert!(best.cost < zero.cost);
}

#[test]
fn removing_an_obstacle_never_raises_cost() {
    let (scn, base) = scenario_tree("perpendicular_blocked.scn", Some(1.0));
    let cfg = scn.planner.tree_config();
    for skip in 0..scn.obstacles.len() {
        let obs: Vec<ConvexPolygon> = scn
            .obstacles
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, o)| o.clone())
            .collect();
        let env = CollisionChecker::new(scn.bounds, obs, 2.0);
        let t = build_perpendicular_tree(scn.spot.goal, 1.0, &env, &scn.vehicle, &cfg, TreeStyle::Continuous);
        assert!(t.cost <= base.cost + 1e-12, "removing obstacle {skip}");
    }
}

fn check_tree_invariants(scn: &cctree::environment::Scenario, t: &TargetTree) {
    let env = scn.collision_checker();
    let p = &scn.vehicle;
    assert!((0.0..=1.0).contains(&t.cost));
    assert_eq!(tree_cost(t, t.l_max, t.w_max), t.cost);
    for c in &t.candidate_goals {
        assert!(env.pose_free(p, &c.pose));
        let on_branch = t.branches[c.branch].path.pose_at(c.remaining).unwrap();
        assert!(on_branch.approx_eq(&c.pose, 1e-9));
    }
    for (i, b) in t.branches.iter().enumerate() {
        assert!(b.path.start_pose().is_none_or(|s| s.approx_eq(&t.q_goal, 1e-12)));
        assert!(env.path_free(p, &b.path, scn.planner.ds_col));
        let samples = b.path.sample(0.01);
        for w in samples.windows(2) {
            if w[0].direction == w[1].direction {
                let dk = (w[1].pose.kappa - w[0].pose.kappa).abs();
                assert!(
                    dk <= p.sigma_max * (w[1].s - w[0].s) + 1e-9,
                    "branch {i} at s = {}",
                    w[0].s
                );
            }
        }
        let rem: Vec<f64> = t
            .candidate_goals
            .iter()
            .filter(|c| c.branch == i)
            .map(|c| c.remaining)
            .collect();
        assert!(rem.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn bundled_trees_satisfy_invariants() {
    for name in [
        "perpendicular.scn",
        "perpendicular_blocked.scn",
        "parallel.scn",
        "empty.scn",
    ] {
        let (scn, t) = scenario_tree(name, None);
        check_tree_invariants(&scn, &t);
    }
}

#[test]
fn parallel_spot_needs_two_arc_pairs() {
    let (scn, t) = scenario_tree("parallel.scn", None);
    assert_eq!(t.arc_pairs, 2);
    let cfg = scn.planner.tree_config();
    let env = scn.collision_checker();
    for b in &t.branches {
        let kinds: Vec<SegmentKind> = b.path.segments.iter().take(5).map(|s| s.kind).collect();
        assert_eq!(kinds[..4], [SegmentKind::Arc; 4]);
        assert_eq!(kinds[4], SegmentKind::Clothoid);
        let dirs: Vec<Direction> = b.path.segments.iter().take(4).map(|s| s.direction).collect();
        assert_eq!(
            dirs,
            vec![
                Direction::Backward,
                Direction::Forward,
                Direction::Backward,
                Direction::Forward
            ]
        );
    }
    let segs = &t.branches[0].path.segments;
    for seg in &segs[..3] {
        let c = env.clearance(&scn.vehicle, &seg.end_pose());
        assert!(
            c >= cfg.clearance_margin - 1e-9 && c <= cfg.clearance_margin + cfg.ds_col,
            "clearance {c}"
        );
    }
}

#[test]
fn longer_parallel_spot_needs_one_pair() {
    let mut scn = common::load("parallel.scn");
    let gx = scn.spot.goal.x;
    scn.obstacles = scn
        .obstacles
        .iter()
        .map(|o| {
            let b = *o.aabb();
            if b.min_x > gx && b.max_y < 5.0 && b.min_y > 0.4 {
                ConvexPolygon::rectangle(b.min_x + 4.0, b.min_y, b.max_x + 4.0, b.max_y)
            } else {
                o.clone()
            }
        })
        .collect();
    let env = scn.collision_checker();
    let t = build_parallel_tree(
        scn.spot.goal,
        0.0,
        &env,
        &scn.vehicle,
        &scn.planner.tree_config(),
        TreeStyle::Continuous,
    )
    .unwrap();
    assert_eq!(t.arc_pairs, 1);
    let kinds: Vec<SegmentKind> = t.branches[0].path.segments.iter().take(3).map(|s| s.kind).collect();
    assert_eq!(kinds, vec![SegmentKind::Arc, SegmentKind::Arc, SegmentKind::Clothoid]);
}

#[test]
fn short_parallel_spot_is_infeasible() {
    let p = VehicleParams::default();
    let cfg = TreeConfig::default();
    let short = p.body_length + 2.0 * cfg.clearance_margin - 0.01;
    assert!(matches!(
        check_spot(ParkingMode::Parallel, short, &p, &cfg),
        Err(TreeError::InfeasibleSpot(_))
    ));
    assert!(check_spot(ParkingMode::Perpendicular, short, &p, &cfg).is_ok());
    let scn = common::load("parallel.scn");
    let r = initialize_target_tree(
        ParkingMode::Parallel,
        scn.spot.goal,
        short,
        &scn.collision_checker(),
        &p,
        &cfg,
        TreeStyle::Continuous,
    );
    assert!(matches!(r, Err(TreeError::InfeasibleSpot(_))));
}

#[test]
fn too_few_arc_pairs_is_infeasible() {
    let scn = common::load("parallel.scn");
    let cfg = TreeConfig {
        max_arc_pairs: 1,
        ..scn.planner.tree_config()
    };
    let r = build_parallel_tree(
        scn.spot.goal,
        0.0,
        &scn.collision_checker(),
        &scn.vehicle,
        &cfg,
        TreeStyle::Continuous,
    );
    assert!(matches!(r, Err(TreeError::InfeasibleSpot(_))));
}

#[test]
fn discontinuous_branches_fail_validation() {
    let env = open_space(vec![]);
    let t = perpendicular(&env, 2.0, TreeStyle::Discontinuous);
    let p = VehicleParams::default();
    let turning: Vec<_> = t.branches.iter().filter(|b| b.branch_sigma != 0.0).collect();
    assert!(!turning.is_empty());
    for b in turning {
        let k = b.path.segments[1].start_kappa.abs();
        assert!((k - p.kappa_max).abs() < 1e-12 || k < p.kappa_max);
        assert!(matches!(
            b.path.validate(&p, 0.05, 1e-9),
            Err(PathViolation::CurvatureJump { .. })
        ));
    }
    let cont = perpendicular(&env, 2.0, TreeStyle::Continuous);
    for b in &cont.branches {
        b.path.validate(&p, 0.05, 1e-9).unwrap();
    }
}

#[test]
fn tree_dump_counts_down_to_goal() {
    let env = open_space(vec![]);
    let t = perpendicular(&env, 1.0, TreeStyle::Continuous);
    let csv = tree_to_csv(&t);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("branch_id,s,x,y,theta,kappa,remaining_length"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    for id in 0..t.branches.len() {
        let mine: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] == id as f64).collect();
        let last = mine.last().unwrap();
        assert!(last[6].abs() < 1e-12);
        assert!(last[2].abs() < 1e-9 && last[3].abs() < 1e-9);
        assert!(mine.windows(2).all(|w| w[1][6] < w[0][6]));
    }
}
