//! Target trees: sets of collision-free drive-out paths grown from the parking
//! goal, discretized into candidate goals for the sampler.
//!
//! The parked vehicle faces out of the spot, so each branch is driven out of
//! the spot and the parking path follows it in reverse. Branches are built in
//! the tree frame, whose origin is the end of the straight drive-out segment
//! with x pointing along it; the cost only looks at branch tips in that frame.

mod build;
mod parallel;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cc_paths::Path;
use crate::environment::{CollisionChecker, ParkingMode};
use crate::error::TreeError;
use crate::geometry::{Pose, VehicleParams};

pub use build::{branch_sweep, build_perpendicular_tree};
pub use parallel::build_parallel_tree;

/// Shape of the branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TreeStyle {
    /// Straight, clothoid, arc: curvature is continuous along every branch.
    Continuous,
    /// Straight then arc, with a curvature step at the joint.
    Discontinuous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    pub n_branches: usize,
    pub goal_ds: f64,
    pub max_turn_angle: f64,
    pub clearance_margin: f64,
    pub max_arc_pairs: usize,
    pub exit_heading: f64,
    pub ds_col: f64,
    pub alpha: f64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        crate::planner::PlannerConfig::default().tree_config()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetBranch {
    /// World-frame drive-out path starting at the goal.
    pub path: Path,
    /// Sharpness of the turning clothoid (curvature of the arc for
    /// discontinuous trees); zero for the straight branch.
    pub branch_sigma: f64,
    /// World-frame end pose.
    pub tip: Pose,
    /// End pose in the tree frame.
    pub tip_local: Pose,
    pub truncated_by_collision: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateGoal {
    pub pose: Pose,
    /// Arc length from this pose back to the goal along its branch.
    pub remaining: f64,
    pub branch: usize,
}

#[derive(Debug, Clone)]
pub struct TargetTree {
    pub mode: ParkingMode,
    pub style: TreeStyle,
    pub q_goal: Pose,
    pub branches: Vec<TargetBranch>,
    pub straight_length_l: f64,
    /// Length of the prefix every branch shares (exit arcs and the straight).
    pub shared_length: f64,
    /// World pose of the tree frame.
    pub frame: Pose,
    pub candidate_goals: Vec<CandidateGoal>,
    pub cost: f64,
    pub l_max: f64,
    pub w_max: f64,
    /// Backward/forward arc pairs used to leave a parallel spot.
    pub arc_pairs: usize,
}

impl TargetTree {
    /// Parking path from a candidate goal to the goal: the branch prefix driven
    /// in reverse.
    pub fn suffix_to_goal(&self, candidate: &CandidateGoal) -> Path {
        self.branches[candidate.branch]
            .path
            .truncated(candidate.remaining)
            .reversed()
    }

    /// A tree made of the goal alone, for the planner without target trees.
    pub fn single_goal(q_goal: Pose, mode: ParkingMode) -> Self {
        let goal = q_goal.with_kappa(0.0);
        TargetTree {
            mode,
            style: TreeStyle::Continuous,
            q_goal: goal,
            branches: vec![TargetBranch {
                path: Path::new(),
                branch_sigma: 0.0,
                tip: goal,
                tip_local: Pose::identity(),
                truncated_by_collision: false,
            }],
            straight_length_l: 0.0,
            shared_length: 0.0,
            frame: goal,
            candidate_goals: vec![CandidateGoal {
                pose: goal,
                remaining: 0.0,
                branch: 0,
            }],
            cost: 1.0,
            l_max: 0.0,
            w_max: 0.0,
            arc_pairs: 0,
        }
    }
}

/// Obstacle-free extents of the turning sweep in the tree frame: the largest
/// `|x|` and `|y|` over the branch tips.
pub fn compute_reference_extents(params: &VehicleParams, config: &TreeConfig, style: TreeStyle) -> (f64, f64) {
    let mut l_max: f64 = 0.0;
    let mut w_max: f64 = 0.0;
    for (_, path) in branch_sweep(params, config, style) {
        if let Some(tip) = path.end_pose() {
            l_max = l_max.max(tip.x.abs());
            w_max = w_max.max(tip.y.abs());
        }
    }
    (l_max, w_max)
}

/// Coverage cost of a tree: one minus the area of the per-side tip rectangles
/// over the obstacle-free area `2·l_max·w_max`. Tips with `y = 0` count on
/// both sides; an empty side contributes nothing.
pub fn tree_cost(tree: &TargetTree, l_max: f64, w_max: f64) -> f64 {
    let tips: Vec<Pose> = tree.branches.iter().map(|b| b.tip_local).collect();
    tips_cost(&tips, l_max, w_max)
}

pub fn tips_cost(tips: &[Pose], l_max: f64, w_max: f64) -> f64 {
    let side_area = |left: bool| {
        let mut mx: f64 = 0.0;
        let mut my: f64 = 0.0;
        for t in tips {
            let on_side = if left { t.y >= 0.0 } else { t.y <= 0.0 };
            if on_side {
                mx = mx.max(t.x.abs());
                my = my.max(t.y.abs());
            }
        }
        mx * my
    };
    let total = side_area(true) + side_area(false);
    (1.0 - total / (2.0 * l_max * w_max)).clamp(0.0, 1.0)
}

/// Straight-segment lengths tried by the minimum-cost search:
/// `0, α, 2α, …` up to and including `l_parking`.
pub fn straight_lengths(alpha: f64, l_parking: f64) -> Vec<f64> {
    let n = (l_parking / alpha + 1e-9).floor() as usize;
    let mut out: Vec<f64> = (0..=n).map(|k| k as f64 * alpha).collect();
    if l_parking - out[n] > 1e-9 {
        out.push(l_parking);
    }
    out
}

/// Builds one tree of either mode.
pub fn build_tree(
    mode: ParkingMode,
    q_goal: Pose,
    l: f64,
    env: &CollisionChecker,
    params: &VehicleParams,
    config: &TreeConfig,
    style: TreeStyle,
) -> Result<TargetTree, TreeError> {
    match mode {
        ParkingMode::Perpendicular => Ok(build_perpendicular_tree(q_goal, l, env, params, config, style)),
        ParkingMode::Parallel => build_parallel_tree(q_goal, l, env, params, config, style),
    }
}

/// Rejects parallel spots shorter than the body plus a clearance margin at
/// each end.
pub fn check_spot(
    mode: ParkingMode,
    spot_length: f64,
    params: &VehicleParams,
    config: &TreeConfig,
) -> Result<(), TreeError> {
    if mode == ParkingMode::Parallel && parallel::spot_too_short(spot_length, params, config) {
        return Err(TreeError::InfeasibleSpot(format!(
            "spot length {spot_length:.3} m is below body length plus two clearance margins"
        )));
    }
    Ok(())
}

/// Result of the minimum-cost search, with every evaluated `(l, cost)`.
#[derive(Debug, Clone)]
pub struct TreeSearch {
    pub tree: TargetTree,
    pub evaluated: Vec<(f64, f64)>,
    pub seconds: f64,
}

/// Builds trees for every straight length up to `l_parking` (the spot
/// length) and keeps the cheapest; ties go to the shorter straight.
#[allow(clippy::too_many_arguments)]
pub fn initialize_target_tree(
    mode: ParkingMode,
    q_goal: Pose,
    l_parking: f64,
    env: &CollisionChecker,
    params: &VehicleParams,
    config: &TreeConfig,
    style: TreeStyle,
) -> Result<TreeSearch, TreeError> {
    let t0 = Instant::now();
    check_spot(mode, l_parking, params, config)?;
    let exit = match mode {
        ParkingMode::Parallel => Some(parallel::find_parallel_exit(q_goal, env, params, config, style)?),
        ParkingMode::Perpendicular => None,
    };
    let mut best: Option<TargetTree> = None;
    let mut evaluated = Vec::new();
    for l in straight_lengths(config.alpha, l_parking) {
        let tree = match &exit {
            Some(e) => parallel::grow_from_exit(q_goal, e, l, env, params, config, style),
            None => build_perpendicular_tree(q_goal, l, env, params, config, style),
        };
        evaluated.push((l, tree.cost));
        if best.as_ref().is_none_or(|b| tree.cost < b.cost) {
            best = Some(tree);
        }
    }
    Ok(TreeSearch {
        tree: best.expect("at least one straight length"),
        evaluated,
        seconds: t0.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tip(x: f64, y: f64) -> Pose {
        Pose::new(x, y, 0.0, 0.0)
    }

    #[test]
    fn cost_exact_cases() {
        let full = [tip(8.0, 0.0), tip(8.0, 6.0), tip(8.0, -6.0), tip(5.0, 3.0)];
        assert_eq!(tips_cost(&full, 8.0, 6.0), 0.0);
        let blocked = [tip(0.0, 0.0), tip(0.0, 0.0), tip(0.0, 0.0)];
        assert_eq!(tips_cost(&blocked, 8.0, 6.0), 1.0);
        let one_side = [tip(8.0, 0.0), tip(8.0, 6.0), tip(0.0, 0.0)];
        assert_eq!(tips_cost(&one_side, 8.0, 6.0), 0.5);
        assert_eq!(tips_cost(&[], 8.0, 6.0), 1.0);
    }

    #[test]
    fn straight_length_grid() {
        assert_eq!(straight_lengths(2.0, 2.0), vec![0.0, 2.0]);
        assert_eq!(straight_lengths(0.2, 1.0).len(), 6);
        assert_eq!(straight_lengths(0.4, 1.0), vec![0.0, 0.4, 0.8, 1.0]);
    }
}
