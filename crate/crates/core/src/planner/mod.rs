//! Anytime RRT* with target-tree goal sampling.
//!
//! Candidate goals of the target tree are mixed into the sampler with
//! probability `tau`. Steering reaches sampled poses exactly, so a node whose
//! pose equals a candidate goal joins the solution set; the best solution is
//! the one with the shortest tree path plus reversed branch suffix.

mod config;
mod tree;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use config::{Budget, PlannerConfig, DEFAULT_TIME_BUDGET};
pub use tree::{pose_distance, Node, PlannerTree};

use crate::cc_paths::{CcSteer, Path};
use crate::environment::{CollisionChecker, Scenario};
use crate::error::PlanError;
use crate::geometry::{Pose, VehicleParams};
use crate::target_tree::{build_tree, check_spot, initialize_target_tree, CandidateGoal, TargetTree, TreeStyle};

/// Tolerance for a node to count as sitting on a candidate goal.
pub const GOAL_TOL: f64 = 1e-6;

/// Which target tree the planner samples from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    /// Minimum-cost continuous-curvature tree over all straight lengths.
    MinCost,
    /// Continuous-curvature tree with a fixed straight length.
    FixedL(f64),
    /// Minimum-cost tree with straight-plus-arc branches.
    Discontinuous,
    /// No tree: the goal pose is the only candidate.
    NoTree,
}

impl Variant {
    pub fn name(&self) -> String {
        match self {
            Variant::MinCost => "min_cost_tree".into(),
            Variant::FixedL(l) => format!("fixed_l_tree({l})"),
            Variant::Discontinuous => "discontinuous_tree".into(),
            Variant::NoTree => "no_tree_baseline".into(),
        }
    }

    /// Parses the names produced by [`name`](Self::name); `fixed_l_tree` alone
    /// means `l = 0`.
    pub fn parse(s: &str) -> Option<Variant> {
        match s {
            "min_cost_tree" | "min_cost" => Some(Variant::MinCost),
            "discontinuous_tree" | "discontinuous" => Some(Variant::Discontinuous),
            "no_tree_baseline" | "no_tree" => Some(Variant::NoTree),
            "fixed_l_tree" => Some(Variant::FixedL(0.0)),
            _ => {
                let inner = s.strip_prefix("fixed_l_tree(")?.strip_suffix(')')?;
                let l: f64 = inner.trim().parse().ok()?;
                (l.is_finite() && l >= 0.0).then_some(Variant::FixedL(l))
            }
        }
    }
}

/// A node that reached a candidate goal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solution {
    pub node: usize,
    pub candidate: usize,
    /// Tree cost plus the remaining branch length, as last evaluated.
    pub total_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryEntry {
    pub elapsed: f64,
    pub iteration: u64,
    pub best_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanStats {
    pub iterations: u64,
    pub nodes: usize,
    pub t_tfs: f64,
    pub t_ttfp: Option<f64>,
    pub t_total: f64,
    /// Iteration at which the first solution appeared; 0 when the start
    /// already lies on a candidate goal.
    pub first_solution_iteration: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    pub variant: Variant,
    pub best_path: Option<Path>,
    pub best_length: Option<f64>,
    pub q_soln: Vec<Solution>,
    pub history: Vec<HistoryEntry>,
    pub stats: PlanStats,
    pub tree_cost: f64,
    pub tree_straight_length: f64,
}

impl PlanResult {
    pub fn succeeded(&self) -> bool {
        self.best_path.is_some()
    }

    /// The best path, or `NoPathFound` when the budget ran out without one.
    pub fn path(&self) -> Result<&Path, PlanError> {
        self.best_path.as_ref().ok_or(PlanError::NoPathFound {
            iterations: self.stats.iterations,
        })
    }
}

/// What one iteration did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    NoProgress,
    Inserted { node: usize, rewired: usize },
}

/// Incremental planner state. [`plan`] drives it to a budget; tests can call
/// [`step`](Self::step) directly and inspect the tree in between.
pub struct Planner {
    params: VehicleParams,
    cfg: PlannerConfig,
    env: CollisionChecker,
    steer: CcSteer,
    target: TargetTree,
    tree: PlannerTree,
    rng: ChaCha8Rng,
    is_solution: Vec<bool>,
    solutions: Vec<Solution>,
    best: Option<Solution>,
    history: Vec<HistoryEntry>,
    iterations: u64,
    first_solution_iteration: Option<u64>,
    t_tfs: f64,
    t_ttfp: Option<f64>,
    clock: Instant,
}

/// No path between the poses is shorter than this: the heading turns at
/// most `kappa_max` per meter.
fn lower_bound(a: &Pose, b: &Pose, kappa_max: f64) -> f64 {
    a.distance_xy(b)
        .max(crate::geometry::angle_diff(a.theta, b.theta).abs() / kappa_max)
}

impl Planner {
    /// Builds the target tree for `variant` and seeds the RRT* tree at the
    /// start pose. The clock starts here.
    pub fn new(scn: &Scenario, variant: Variant, seed: u64) -> Result<Self, PlanError> {
        scn.validate()?;
        let clock = Instant::now();
        let env = scn.collision_checker();
        let params = scn.vehicle;
        let cfg = scn.planner;
        let tree_cfg = cfg.tree_config();
        let (target, t_tfs) = match variant {
            Variant::NoTree => (TargetTree::single_goal(scn.spot.goal, scn.spot.mode), 0.0),
            Variant::MinCost | Variant::Discontinuous => {
                let style = if variant == Variant::Discontinuous {
                    TreeStyle::Discontinuous
                } else {
                    TreeStyle::Continuous
                };
                let search = initialize_target_tree(
                    scn.spot.mode,
                    scn.spot.goal,
                    scn.spot.length,
                    &env,
                    &params,
                    &tree_cfg,
                    style,
                )?;
                (search.tree, search.seconds)
            }
            Variant::FixedL(l) => {
                let t0 = Instant::now();
                check_spot(scn.spot.mode, scn.spot.length, &params, &tree_cfg)?;
                let tree = build_tree(
                    scn.spot.mode,
                    scn.spot.goal,
                    l,
                    &env,
                    &params,
                    &tree_cfg,
                    TreeStyle::Continuous,
                )?;
                (tree, t0.elapsed().as_secs_f64())
            }
        };
        let root = scn.start.with_kappa(0.0);
        let mut planner = Planner {
            params,
            cfg,
            env,
            steer: CcSteer::new(&params, cfg.max_switches),
            target,
            tree: PlannerTree::new(root),
            rng: ChaCha8Rng::seed_from_u64(seed),
            is_solution: vec![false],
            solutions: Vec::new(),
            best: None,
            history: Vec::new(),
            iterations: 0,
            first_solution_iteration: None,
            t_tfs,
            t_ttfp: None,
            clock,
        };
        if let Some(c) = planner.candidate_at(&root) {
            planner.add_solution(0, c);
        }
        Ok(planner)
    }

    pub fn tree(&self) -> &PlannerTree {
        &self.tree
    }

    pub fn target(&self) -> &TargetTree {
        &self.target
    }

    pub fn collision_checker(&self) -> &CollisionChecker {
        &self.env
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn best(&self) -> Option<Solution> {
        self.best
    }

    pub fn solutions(&self) -> &[Solution] {
        &self.solutions
    }

    /// Draws a sample: a uniformly chosen candidate goal with probability
    /// `tau`, else a uniform pose in the bounds. The index is `Some` for
    /// candidate samples.
    pub fn sample(&mut self) -> (Pose, Option<usize>) {
        sample_pose(&mut self.rng, &self.cfg, &self.env, &self.target)
    }

    fn candidate_at(&self, pose: &Pose) -> Option<usize> {
        self.target
            .candidate_goals
            .iter()
            .position(|c| c.pose.approx_eq(pose, GOAL_TOL) && (c.pose.kappa - pose.kappa).abs() <= 1e-9)
    }

    fn near_radius(&self) -> f64 {
        let n = self.tree.len() as f64;
        (self.cfg.rewire_gamma * (n.ln() / n).cbrt()).min(self.cfg.near_radius_max)
    }

    fn edge_free(&self, path: &Path) -> bool {
        self.env.path_free(&self.params, path, self.cfg.ds_col)
    }

    /// One sampling iteration: sample, extend, choose a parent, rewire.
    pub fn step(&mut self) -> StepOutcome {
        self.step_with(&mut |_| {})
    }

    /// Like [`step`](Self::step), calling `on_rewire` after every rewire.
    pub fn step_with(&mut self, on_rewire: &mut dyn FnMut(&PlannerTree)) -> StepOutcome {
        self.iterations += 1;
        let (q_rand, cand) = self.sample();
        self.extend_with(q_rand, cand, on_rewire)
    }

    /// Extends the tree toward a given pose, as one iteration would after
    /// sampling it. A pose on a candidate goal is recognized as such.
    pub fn extend(&mut self, q_rand: Pose) -> StepOutcome {
        self.extend_with(q_rand, None, &mut |_| {})
    }

    fn extend_with(
        &mut self,
        q_rand: Pose,
        cand: Option<usize>,
        on_rewire: &mut dyn FnMut(&PlannerTree),
    ) -> StepOutcome {
        let nearest = self.tree.nearest(&q_rand, self.cfg.w_xy, self.cfg.w_theta);
        let from = self.tree.node(nearest).pose;
        let Some(mut edge) = self.steer.steer(from, q_rand) else {
            return StepOutcome::NoProgress;
        };
        let reached = edge.length() <= self.cfg.steer_step;
        if !reached {
            edge = edge.truncated(self.cfg.steer_step);
        }
        let Some(q_new) = edge.end_pose() else {
            return StepOutcome::NoProgress;
        };
        let q_new = if reached { q_rand } else { q_new };
        if !self.edge_free(&edge) {
            return StepOutcome::NoProgress;
        }

        // Choose parent.
        let kmax = self.params.kappa_max;
        let near = self.tree.near(&q_new, self.near_radius());
        let duplicate = near.iter().any(|&i| {
            let p = self.tree.node(i).pose;
            p.approx_eq(&q_new, GOAL_TOL) && (p.kappa - q_new.kappa).abs() <= 1e-9
        });
        if duplicate {
            return StepOutcome::NoProgress;
        }
        let mut parent = nearest;
        let mut best_cost = self.tree.node(nearest).cost + edge.length();
        let mut best_edge = edge;
        let mut order: Vec<(f64, usize)> = near
            .iter()
            .filter(|&&i| i != nearest)
            .map(|&i| {
                let n = self.tree.node(i);
                (n.cost + lower_bound(&n.pose, &q_new, kmax), i)
            })
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(lb, i) in &order {
            if lb >= best_cost {
                break;
            }
            let n = self.tree.node(i);
            let Some(p) = self.steer.steer_within(n.pose, q_new, best_cost - n.cost) else {
                continue;
            };
            let c = n.cost + p.length();
            if c < best_cost && self.edge_free(&p) {
                best_cost = c;
                parent = i;
                best_edge = p;
            }
        }
        let new_id = self.tree.insert(parent, q_new, best_edge, best_cost);
        self.is_solution.push(false);

        // Rewire.
        let mut rewired = 0;
        let mut solution_changed = false;
        for &i in &near {
            if i == parent {
                continue;
            }
            let n = self.tree.node(i);
            if best_cost + lower_bound(&q_new, &n.pose, kmax) >= n.cost {
                continue;
            }
            let target_pose = n.pose;
            let old_cost = n.cost;
            let Some(p) = self.steer.steer_within(q_new, target_pose, old_cost - best_cost) else {
                continue;
            };
            let c = best_cost + p.length();
            if c >= old_cost || self.tree.is_ancestor(i, new_id) || !self.edge_free(&p) {
                continue;
            }
            let changed = self.tree.rewire(i, new_id, p, c);
            rewired += 1;
            solution_changed |= changed.iter().any(|&k| self.is_solution[k]);
            on_rewire(&self.tree);
        }

        let cand = cand.filter(|_| reached).or_else(|| self.candidate_at(&q_new));
        if let Some(c) = cand {
            self.add_solution(new_id, c);
        } else if solution_changed {
            self.reselect();
        }
        StepOutcome::Inserted { node: new_id, rewired }
    }

    fn add_solution(&mut self, node: usize, candidate: usize) {
        self.is_solution[node] = true;
        let total_length = self.tree.node(node).cost + self.target.candidate_goals[candidate].remaining;
        self.solutions.push(Solution {
            node,
            candidate,
            total_length,
        });
        if self.first_solution_iteration.is_none() {
            self.first_solution_iteration = Some(self.iterations);
            self.t_ttfp = Some(self.clock.elapsed().as_secs_f64());
        }
        self.reselect();
    }

    /// Re-evaluates every solution's total length and records an improvement.
    fn reselect(&mut self) {
        let mut best: Option<Solution> = None;
        for s in &mut self.solutions {
            s.total_length = self.tree.node(s.node).cost + self.target.candidate_goals[s.candidate].remaining;
            if best.is_none_or(|b| s.total_length < b.total_length) {
                best = Some(*s);
            }
        }
        let Some(b) = best else { return };
        let improved = self.history.last().is_none_or(|h| b.total_length < h.best_length);
        self.best = best;
        if improved {
            self.history.push(HistoryEntry {
                elapsed: self.clock.elapsed().as_secs_f64(),
                iteration: self.iterations,
                best_length: b.total_length,
            });
        }
    }

    /// Tree path to the solution node followed by the reversed branch suffix.
    pub fn solution_path(&self, s: &Solution) -> Path {
        let mut path = self.tree.path_to(s.node);
        let cand: &CandidateGoal = &self.target.candidate_goals[s.candidate];
        let split = path.length();
        path.extend(&self.target.suffix_to_goal(cand));
        path.tree_suffix_from = Some(split);
        path
    }

    /// Runs until the budget is spent.
    pub fn run(&mut self, budget: Budget) {
        match budget {
            Budget::Iterations(n) => {
                while self.iterations < n {
                    self.step();
                }
            }
            Budget::Time(t) => {
                while self.clock.elapsed().as_secs_f64() < t {
                    self.step();
                }
            }
        }
    }

    pub fn result(&self, variant: Variant) -> PlanResult {
        let best_path = self.best.map(|b| self.solution_path(&b));
        PlanResult {
            variant,
            best_length: self.best.map(|b| b.total_length),
            best_path,
            q_soln: self.solutions.clone(),
            history: self.history.clone(),
            stats: PlanStats {
                iterations: self.iterations,
                nodes: self.tree.len(),
                t_tfs: self.t_tfs,
                t_ttfp: self.t_ttfp,
                t_total: self.clock.elapsed().as_secs_f64(),
                first_solution_iteration: self.first_solution_iteration,
            },
            tree_cost: self.target.cost,
            tree_straight_length: self.target.straight_length_l,
        }
    }
}

/// Sampler shared by the planner and its tests.
pub fn sample_pose(
    rng: &mut impl Rng,
    cfg: &PlannerConfig,
    env: &CollisionChecker,
    target: &TargetTree,
) -> (Pose, Option<usize>) {
    let goals = &target.candidate_goals;
    if !goals.is_empty() && rng.gen::<f64>() < cfg.tau {
        let i = rng.gen_range(0..goals.len());
        return (goals[i].pose, Some(i));
    }
    let b = env.bounds();
    let x = rng.gen_range(b.min_x..=b.max_x);
    let y = rng.gen_range(b.min_y..=b.max_y);
    let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    (Pose::new(x, y, theta, 0.0), None)
}

/// Plans with `variant` under the scenario's budget and seed.
pub fn plan_variant(scn: &Scenario, variant: Variant) -> Result<PlanResult, PlanError> {
    let mut p = Planner::new(scn, variant, scn.seed)?;
    p.run(scn.planner.budget());
    Ok(p.result(variant))
}

/// Minimum-cost continuous-curvature target tree.
pub fn plan(scn: &Scenario) -> Result<PlanResult, PlanError> {
    plan_variant(scn, Variant::MinCost)
}

/// Same search with the goal pose as the only candidate.
pub fn plan_baseline_no_tree(scn: &Scenario) -> Result<PlanResult, PlanError> {
    plan_variant(scn, Variant::NoTree)
}

/// Same search with straight-plus-arc branches.
pub fn plan_discontinuous_variant(scn: &Scenario) -> Result<PlanResult, PlanError> {
    plan_variant(scn, Variant::Discontinuous)
}
