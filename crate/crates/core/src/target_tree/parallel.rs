use super::build::{grow_tree, to_world, Grower};
use super::{TargetTree, TreeConfig, TreeStyle};
use crate::cc_paths::{stations, Direction, Path, PathSegment};
use crate::environment::{CollisionChecker, ParkingMode};
use crate::error::TreeError;
use crate::geometry::{Pose, VehicleParams};

/// Bisection steps when locating the clearance limit on an arc.
const BISECT_STEPS: usize = 40;

struct ParallelExit {
    /// Goal-frame path: arc pairs, exit arc and the closing clothoid.
    path: Path,
    pairs: usize,
}

/// Parallel target tree: alternate full-lock backward and forward arcs inside
/// the spot until a forward turn clears it, then ramp the curvature back to
/// zero and continue like a perpendicular tree from there. Both exit sides
/// are tried; the one needing fewer arc pairs (then the shorter one) wins.
pub fn build_parallel_tree(
    q_goal: Pose,
    l: f64,
    env: &CollisionChecker,
    params: &VehicleParams,
    config: &TreeConfig,
    style: TreeStyle,
) -> Result<TargetTree, TreeError> {
    let exit = find_parallel_exit(q_goal, env, params, config, style)?;
    Ok(grow_from_exit(q_goal, &exit, l, env, params, config, style))
}

/// World-frame drive-out of a parallel spot, shared by trees of every
/// straight length.
#[derive(Debug, Clone)]
pub(crate) struct ExitManeuver {
    path: Path,
    pairs: usize,
}

pub(crate) fn find_parallel_exit(
    q_goal: Pose,
    env: &CollisionChecker,
    params: &VehicleParams,
    config: &TreeConfig,
    style: TreeStyle,
) -> Result<ExitManeuver, TreeError> {
    let goal = q_goal.with_kappa(0.0);
    let mut best: Option<ParallelExit> = None;
    for side in [1.0, -1.0] {
        if let Some(exit) = parallel_exit(goal, side, env, params, config, style) {
            let better = match &best {
                None => true,
                Some(b) => (exit.pairs, exit.path.length()) < (b.pairs, b.path.length()),
            };
            if better {
                best = Some(exit);
            }
        }
    }
    let exit = best.ok_or_else(|| {
        TreeError::InfeasibleSpot(format!("no drive-out found within {} arc pairs", config.max_arc_pairs))
    })?;
    Ok(ExitManeuver {
        path: Path::from_segments(exit.path.segments.iter().map(|s| to_world(goal, *s))),
        pairs: exit.pairs,
    })
}

pub(crate) fn grow_from_exit(
    q_goal: Pose,
    exit: &ExitManeuver,
    l: f64,
    env: &CollisionChecker,
    params: &VehicleParams,
    config: &TreeConfig,
    style: TreeStyle,
) -> TargetTree {
    let goal = q_goal.with_kappa(0.0);
    let end = exit.path.end_pose().unwrap_or(goal).with_kappa(0.0);
    grow_tree(
        ParkingMode::Parallel,
        goal,
        exit.path.clone(),
        end,
        exit.pairs,
        l,
        env,
        params,
        config,
        style,
    )
}

/// Checks a spot's length against the body and clearance margins.
pub(crate) fn spot_too_short(spot_length: f64, params: &VehicleParams, config: &TreeConfig) -> bool {
    spot_length < params.body_length + 2.0 * config.clearance_margin
}

fn parallel_exit(
    goal: Pose,
    side: f64,
    env: &CollisionChecker,
    params: &VehicleParams,
    config: &TreeConfig,
    style: TreeStyle,
) -> Option<ParallelExit> {
    let kmax = params.kappa_max;
    let grower = Grower {
        env,
        params,
        ds: config.ds_col,
    };
    let mut path = Path::new();
    let mut pose = Pose::identity();
    for pair in 1..=config.max_arc_pairs {
        let back = arc_to_clearance(pose, -side * kmax, Direction::Backward, goal, env, params, config);
        pose = back.end_pose();
        path.push(back);
        if let Some((exit, probe)) = exit_turn(pose, side, params, config, style) {
            let world = Path::from_segments(probe.segments.iter().map(|s| to_world(goal, *s)));
            if grower.path_free(&world) {
                path.extend(&exit);
                return Some(ParallelExit { path, pairs: pair });
            }
        }
        let fwd = arc_to_clearance(pose, side * kmax, Direction::Forward, goal, env, params, config);
        pose = fwd.end_pose();
        path.push(fwd);
    }
    None
}

/// Forward arc until the heading reaches the exit heading (less the closing
/// clothoid's turn), then the clothoid back to zero curvature. The
/// discontinuous style ends the arc at the exit heading and stops there.
fn exit_turn(
    from: Pose,
    side: f64,
    params: &VehicleParams,
    config: &TreeConfig,
    style: TreeStyle,
) -> Option<(Path, Path)> {
    let kmax = params.kappa_max;
    let ramp_turn = match style {
        TreeStyle::Continuous => kmax * kmax / (2.0 * params.sigma_max),
        TreeStyle::Discontinuous => 0.0,
    };
    let remaining = side * (side * config.exit_heading - from.theta) - ramp_turn;
    if remaining < 0.0 {
        return None;
    }
    let arc = PathSegment::arc(from, side * kmax, remaining / kmax, Direction::Forward);
    let mut p = Path::from_segments([arc]);
    if style == TreeStyle::Continuous {
        p.push(PathSegment::clothoid(
            arc.end_pose(),
            side * kmax,
            -side * params.sigma_max,
            kmax / params.sigma_max,
            Direction::Forward,
        ));
    }
    // Half a body length of straight driving must also be clear, so the
    // exit is not declared while the body still overlaps the neighbor.
    let end = p.end_pose().unwrap_or(from);
    let mut probe = p.clone();
    probe.push(PathSegment::straight(end, 0.5 * params.body_length, Direction::Forward));
    Some((p, probe))
}

/// Full-lock arc from `from` (goal frame) that stops where the footprint's
/// clearance drops to the margin, or after a quarter turn.
fn arc_to_clearance(
    from: Pose,
    kappa: f64,
    dir: Direction,
    goal: Pose,
    env: &CollisionChecker,
    params: &VehicleParams,
    config: &TreeConfig,
) -> PathSegment {
    let cap = std::f64::consts::FRAC_PI_2 / kappa.abs();
    let full = PathSegment::arc(from, kappa, cap, dir);
    let world = to_world(goal, full);
    let ok = |s: f64| {
        let p = world.pose_at(s);
        env.pose_free(params, &p) && env.clearance(params, &p) >= config.clearance_margin
    };
    let mut prev = 0.0;
    for s in stations(cap, config.ds_col) {
        if !ok(s) {
            if s == 0.0 {
                return full.truncated(0.0);
            }
            let (mut lo, mut hi) = (prev, s);
            for _ in 0..BISECT_STEPS {
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return full.truncated(lo);
        }
        prev = s;
    }
    full
}
