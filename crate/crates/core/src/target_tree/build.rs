use super::{compute_reference_extents, tips_cost, CandidateGoal, TargetBranch, TargetTree, TreeConfig, TreeStyle};
use crate::cc_paths::{stations, Direction, Path, PathSegment};
use crate::environment::{CollisionChecker, ParkingMode};
use crate::geometry::{compose, Pose, VehicleParams};

/// Grows paths segment by segment, keeping only the collision-free part.
pub(crate) struct Grower<'a> {
    pub env: &'a CollisionChecker,
    pub params: &'a VehicleParams,
    pub ds: f64,
}

pub(crate) fn to_world(frame: Pose, seg: PathSegment) -> PathSegment {
    PathSegment {
        start: compose(frame, seg.start),
        ..seg
    }
}

impl Grower<'_> {
    /// Appends `seg` (given in `frame`) up to its last free sample. Returns
    /// `false` when the segment had to be cut short.
    pub fn append(&self, local: &mut Path, world: &mut Path, frame: Pose, seg: PathSegment) -> bool {
        let w = to_world(frame, seg);
        let mut last_free: Option<f64> = None;
        for s in stations(seg.length, self.ds) {
            if !self.env.pose_free(self.params, &w.pose_at(s)) {
                if let Some(s_free) = last_free {
                    local.push(seg.truncated(s_free));
                    world.push(w.truncated(s_free));
                }
                return false;
            }
            last_free = Some(s);
        }
        local.push(seg);
        world.push(w);
        true
    }

    pub fn path_free(&self, world: &Path) -> bool {
        self.env.path_free(self.params, world, self.ds)
    }
}

/// Symmetric sharpness (or curvature) values of the sweep, zero excluded.
pub(crate) fn sweep_values(n: usize, max: f64) -> Vec<f64> {
    (0..n)
        .map(|k| -max + 2.0 * max * k as f64 / (n - 1) as f64)
        .filter(|v| v.abs() > 1e-12 * max)
        .collect()
}

/// Turning parts of the branches, starting at the tree-frame origin, as
/// `(sweep value, path)` pairs.
pub fn branch_sweep(params: &VehicleParams, config: &TreeConfig, style: TreeStyle) -> Vec<(f64, Path)> {
    let kmax = params.kappa_max;
    let origin = Pose::identity();
    match style {
        TreeStyle::Continuous => sweep_values(config.n_branches, params.sigma_max)
            .into_iter()
            .map(|sigma| {
                let a = sigma.abs();
                let to_kmax = kmax / a;
                let len = to_kmax.min((2.0 * config.max_turn_angle / a).sqrt());
                let clothoid = PathSegment::clothoid(origin, 0.0, sigma, len, Direction::Forward);
                let mut p = Path::from_segments([clothoid]);
                if len >= to_kmax {
                    let turned = kmax * kmax / (2.0 * a);
                    let arc_len = (config.max_turn_angle - turned).max(0.0) / kmax;
                    p.push(PathSegment::arc(
                        clothoid.end_pose(),
                        sigma.signum() * kmax,
                        arc_len,
                        Direction::Forward,
                    ));
                }
                (sigma, p)
            })
            .collect(),
        TreeStyle::Discontinuous => sweep_values(config.n_branches, kmax)
            .into_iter()
            .map(|kappa| {
                let arc = PathSegment::arc(origin, kappa, config.max_turn_angle / kappa.abs(), Direction::Forward);
                (kappa, Path::from_segments([arc]))
            })
            .collect(),
    }
}

/// Grows the straight segment and the branch sweep from `exit` (a world pose
/// with zero curvature) after a shared world-frame `prefix`, and assembles the
/// tree.
#[allow(clippy::too_many_arguments)]
pub(crate) fn grow_tree(
    mode: ParkingMode,
    q_goal: Pose,
    prefix: Path,
    exit: Pose,
    arc_pairs: usize,
    l: f64,
    env: &CollisionChecker,
    params: &VehicleParams,
    config: &TreeConfig,
    style: TreeStyle,
) -> TargetTree {
    let grower = Grower {
        env,
        params,
        ds: config.ds_col,
    };
    let (l_max, w_max) = compute_reference_extents(params, config, style);
    let frame = compose(exit, Pose::new(l, 0.0, 0.0, 0.0));
    let start_local = Pose::new(-l, 0.0, 0.0, 0.0);

    let mut shared_local = Path::new();
    let mut shared_world = prefix;
    let shared_free = grower.append(
        &mut shared_local,
        &mut shared_world,
        frame,
        PathSegment::straight(start_local, l, Direction::Forward),
    );
    let shared_length = shared_world.length();

    let finish = |local: Path, world: Path, sigma: f64, truncated: bool| {
        let tip_local = local.end_pose().unwrap_or(start_local);
        let tip = world.end_pose().unwrap_or(q_goal);
        TargetBranch {
            path: world,
            branch_sigma: sigma,
            tip,
            tip_local,
            truncated_by_collision: truncated,
        }
    };

    let mut branches = Vec::new();
    {
        let mut local = shared_local.clone();
        let mut world = shared_world.clone();
        let free = shared_free
            && grower.append(
                &mut local,
                &mut world,
                frame,
                PathSegment::straight(Pose::identity(), l_max, Direction::Forward),
            );
        branches.push(finish(local, world, 0.0, !free));
    }
    if shared_free {
        for (sigma, turn) in branch_sweep(params, config, style) {
            let mut local = shared_local.clone();
            let mut world = shared_world.clone();
            let mut free = true;
            for seg in &turn.segments {
                if !grower.append(&mut local, &mut world, frame, *seg) {
                    free = false;
                    break;
                }
            }
            branches.push(finish(local, world, sigma, !free));
        }
    }

    let tips: Vec<Pose> = branches.iter().map(|b| b.tip_local).collect();
    let cost = tips_cost(&tips, l_max, w_max);
    let candidate_goals = candidate_goals(&branches, shared_length, config.goal_ds);
    TargetTree {
        mode,
        style,
        q_goal,
        branches,
        straight_length_l: l,
        shared_length,
        frame,
        candidate_goals,
        cost,
        l_max,
        w_max,
        arc_pairs,
    }
}

/// Poses every `goal_ds` along each branch plus every tip. The shared prefix
/// is only taken from the first branch.
fn candidate_goals(branches: &[TargetBranch], shared_length: f64, goal_ds: f64) -> Vec<CandidateGoal> {
    let mut out = Vec::new();
    for (i, b) in branches.iter().enumerate() {
        let len = b.path.length();
        if len == 0.0 {
            if i == 0 {
                out.push(CandidateGoal {
                    pose: b.tip,
                    remaining: 0.0,
                    branch: 0,
                });
            }
            continue;
        }
        for s in stations(len, goal_ds) {
            if i > 0 && s <= shared_length + 1e-9 {
                continue;
            }
            let pose = b.path.pose_at(s).expect("non-empty branch");
            out.push(CandidateGoal {
                pose,
                remaining: s,
                branch: i,
            });
        }
    }
    out
}

/// Perpendicular target tree: straight drive-out of length `l` along the goal
/// heading, then the turning sweep. Never fails; a blocked exit leaves only
/// the straight branch.
pub fn build_perpendicular_tree(
    q_goal: Pose,
    l: f64,
    env: &CollisionChecker,
    params: &VehicleParams,
    config: &TreeConfig,
    style: TreeStyle,
) -> TargetTree {
    let goal = q_goal.with_kappa(0.0);
    grow_tree(
        ParkingMode::Perpendicular,
        goal,
        Path::new(),
        goal,
        0,
        l,
        env,
        params,
        config,
        style,
    )
}
