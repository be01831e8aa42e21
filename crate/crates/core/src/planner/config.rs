use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::ValidationError;
use crate::target_tree::TreeConfig;

/// How long a planning run may go on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    /// Wall-clock seconds.
    Time(f64),
    /// Sampling iterations; makes runs reproducible.
    Iterations(u64),
}

/// Planner and target-tree settings. Every field has a default, so a
/// scenario's `planner` object may name only what it changes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub t_max: Option<f64>,
    pub iter_max: Option<u64>,
    pub tau: f64,
    pub steer_step: f64,
    pub rewire_gamma: f64,
    pub near_radius_max: f64,
    pub ds_col: f64,
    pub w_xy: f64,
    pub w_theta: f64,
    pub alpha: f64,
    pub max_switches: usize,
    pub n_branches: usize,
    pub goal_ds: f64,
    pub max_turn_angle: f64,
    pub clearance_margin: f64,
    pub max_arc_pairs: usize,
    pub exit_heading: f64,
    pub inflation_margin: f64,
    pub cell_size: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            t_max: None,
            iter_max: None,
            tau: 0.2,
            steer_step: 3.0,
            rewire_gamma: 15.0,
            near_radius_max: 6.0,
            ds_col: 0.1,
            w_xy: 1.0,
            w_theta: 1.0,
            alpha: 0.2,
            max_switches: 2,
            n_branches: 9,
            goal_ds: 0.5,
            max_turn_angle: FRAC_PI_2,
            clearance_margin: 0.1,
            max_arc_pairs: 10,
            exit_heading: FRAC_PI_4,
            inflation_margin: 0.0,
            cell_size: 2.0,
        }
    }
}

pub const DEFAULT_TIME_BUDGET: f64 = 3.0;

impl PlannerConfig {
    /// The active budget; three wall-clock seconds when neither is set.
    pub fn budget(&self) -> Budget {
        match (self.iter_max, self.t_max) {
            (Some(n), _) => Budget::Iterations(n),
            (None, Some(t)) => Budget::Time(t),
            (None, None) => Budget::Time(DEFAULT_TIME_BUDGET),
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        match budget {
            Budget::Time(t) => {
                self.t_max = Some(t);
                self.iter_max = None;
            }
            Budget::Iterations(n) => {
                self.iter_max = Some(n);
                self.t_max = None;
            }
        }
        self
    }

    pub fn tree_config(&self) -> TreeConfig {
        TreeConfig {
            n_branches: self.n_branches,
            goal_ds: self.goal_ds,
            max_turn_angle: self.max_turn_angle,
            clearance_margin: self.clearance_margin,
            max_arc_pairs: self.max_arc_pairs,
            exit_heading: self.exit_heading,
            ds_col: self.ds_col,
            alpha: self.alpha,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.t_max.is_some() && self.iter_max.is_some() {
            return Err(ValidationError::new(
                "planner.t_max",
                "only one of t_max and iter_max may be set",
            ));
        }
        if let Some(t) = self.t_max {
            if !(t.is_finite() && t > 0.0) {
                return Err(ValidationError::new("planner.t_max", "must be positive"));
            }
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(ValidationError::new("planner.tau", "must lie in [0, 1]"));
        }
        let positive = [
            ("steer_step", self.steer_step),
            ("rewire_gamma", self.rewire_gamma),
            ("near_radius_max", self.near_radius_max),
            ("ds_col", self.ds_col),
            ("w_xy", self.w_xy),
            ("alpha", self.alpha),
            ("goal_ds", self.goal_ds),
            ("max_turn_angle", self.max_turn_angle),
            ("exit_heading", self.exit_heading),
            ("cell_size", self.cell_size),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ValidationError::new(format!("planner.{name}"), "must be positive"));
            }
        }
        let non_negative = [
            ("w_theta", self.w_theta),
            ("clearance_margin", self.clearance_margin),
            ("inflation_margin", self.inflation_margin),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ValidationError::new(format!("planner.{name}"), "must be non-negative"));
            }
        }
        if self.n_branches < 2 {
            return Err(ValidationError::new("planner.n_branches", "must be at least 2"));
        }
        if self.max_arc_pairs == 0 {
            return Err(ValidationError::new("planner.max_arc_pairs", "must be at least 1"));
        }
        Ok(())
    }
}
