//! Closed-loop tracking of a planned path by a kinematic bicycle with a
//! rate-limited steering actuator and a Kanayama controller.

use serde::{Deserialize, Serialize};

use crate::cc_paths::Path;
use crate::environment::Scenario;
use crate::error::SimError;
use crate::geometry::{angle_diff, normalize_angle, Pose, VehicleParams};

const KMH: f64 = 1.0 / 3.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub v_max_rrt: f64,
    pub v_max_tree: f64,
    pub switch_pause: f64,
    /// Steering slew limit in rad/s; derived from the sharpness limit when
    /// unset.
    pub delta_rate_max: Option<f64>,
    pub k_x: f64,
    pub k_y: f64,
    pub k_theta: f64,
    /// `c` in `v_ref = v_cap / (1 + c·|κ|)`, meters.
    pub curvature_speed_coeff: f64,
    /// Reference sampling step, meters.
    pub ref_ds: f64,
    pub max_time: f64,
    pub divergence_limit: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            v_max_rrt: 4.0 * KMH,
            v_max_tree: 2.0 * KMH,
            switch_pause: 3.0,
            delta_rate_max: None,
            k_x: 1.0,
            k_y: 0.64,
            k_theta: 1.6,
            curvature_speed_coeff: 6.0,
            ref_ds: 0.01,
            max_time: 600.0,
            divergence_limit: 5.0,
        }
    }
}

impl SimConfig {
    /// `σ_max·L·v_max_tree`: the steering rate that follows the sharpest
    /// clothoid at tree-tracking speed.
    pub fn steering_rate(&self, params: &VehicleParams) -> f64 {
        self.delta_rate_max
            .unwrap_or(params.sigma_max * params.wheelbase * self.v_max_tree)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    /// Actual front-wheel angle.
    pub delta: f64,
    pub v: f64,
}

impl VehicleState {
    pub fn pose(&self) -> Pose {
        Pose::new(self.x, self.y, self.theta, 0.0)
    }

    /// At rest on `pose` with the wheels set for its curvature.
    pub fn at_rest(pose: Pose, params: &VehicleParams) -> Self {
        Self {
            x: pose.x,
            y: pose.y,
            theta: pose.theta,
            delta: (params.wheelbase * pose.kappa).atan(),
            v: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub delta_cmd: f64,
    pub delta: f64,
    pub v: f64,
    pub cross_track: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingReport {
    /// `(path arc length, cross-track error)` at every driving step.
    pub cross_track: Vec<(f64, f64)>,
    pub max_cross_track: f64,
    pub mean_cross_track: f64,
    pub lateral_alignment_error: f64,
    pub orientation_alignment_error: f64,
    pub trace: Vec<TraceRow>,
    pub final_state: VehicleState,
    pub duration: f64,
}

/// `(lateral, orientation)` error of a rest pose against the goal. The
/// lateral part is the offset across the spot axis only.
pub fn alignment_errors(state: &VehicleState, q_goal: &Pose) -> (f64, f64) {
    let local = q_goal.inverse_transform_point(state.pose().position());
    (local.y.abs(), angle_diff(state.theta, q_goal.theta).abs())
}

/// One stretch of constant driving direction, sampled densely.
struct Leg {
    dir: f64,
    /// Global arc length of each sample.
    s: Vec<f64>,
    poses: Vec<Pose>,
    caps: Vec<f64>,
}

impl Leg {
    fn length(&self) -> f64 {
        self.s[self.s.len() - 1] - self.s[0]
    }

    /// Closest point on the polyline within a window around sample `hint`:
    /// `(segment index, fraction, distance)`.
    fn closest(&self, x: f64, y: f64, hint: usize, back: usize, ahead: usize) -> (usize, f64, f64) {
        let n = self.poses.len();
        if n == 1 {
            let p = self.poses[0];
            return (0, 0.0, (p.x - x).hypot(p.y - y));
        }
        let lo = hint.saturating_sub(back);
        let hi = (hint + ahead).min(n - 2);
        let mut best = (lo, 0.0, f64::INFINITY);
        for i in lo..=hi {
            let a = self.poses[i];
            let b = self.poses[i + 1];
            let (ex, ey) = (b.x - a.x, b.y - a.y);
            let len2 = ex * ex + ey * ey;
            let f = if len2 > 0.0 {
                (((x - a.x) * ex + (y - a.y) * ey) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let d = (a.x + f * ex - x).hypot(a.y + f * ey - y);
            if d < best.2 {
                best = (i, f, d);
            }
        }
        best
    }

    /// Reference pose and speed cap at a polyline location.
    fn reference(&self, i: usize, f: f64) -> (Pose, f64, f64) {
        let a = self.poses[i];
        let b = self.poses[(i + 1).min(self.poses.len() - 1)];
        let lerp = |u: f64, v: f64| u + f * (v - u);
        let pose = Pose::new(
            lerp(a.x, b.x),
            lerp(a.y, b.y),
            normalize_angle(a.theta + f * angle_diff(b.theta, a.theta)),
            lerp(a.kappa, b.kappa),
        );
        let s = lerp(self.s[i], self.s[(i + 1).min(self.s.len() - 1)]);
        (pose, s, self.caps[i])
    }
}

fn split_legs(path: &Path, cfg: &SimConfig) -> Vec<Leg> {
    let split = path.tree_suffix_from.unwrap_or(f64::INFINITY);
    let mut legs: Vec<Leg> = Vec::new();
    for sample in path.sample(cfg.ref_ds) {
        let dir = sample.direction.sign();
        let cap = if sample.s < split - 1e-9 {
            cfg.v_max_rrt
        } else {
            cfg.v_max_tree
        };
        match legs.last_mut() {
            Some(leg) if leg.dir == dir => {
                leg.s.push(sample.s);
                leg.poses.push(sample.pose);
                leg.caps.push(cap);
            }
            _ => legs.push(Leg {
                dir,
                s: vec![sample.s],
                poses: vec![sample.pose],
                caps: vec![cap],
            }),
        }
    }
    legs
}

/// Tracks `path` from rest at its start pose and reports errors against the
/// scenario's goal.
pub fn simulate_tracking(path: &Path, scn: &Scenario, cfg: &SimConfig) -> Result<TrackingReport, SimError> {
    let start = path.start_pose().ok_or(SimError::EmptyPath)?;
    let initial = VehicleState::at_rest(start, &scn.vehicle);
    simulate_from(path, initial, &scn.spot.goal, &scn.vehicle, cfg)
}

/// Tracks `path` starting from an arbitrary state.
pub fn simulate_from(
    path: &Path,
    initial: VehicleState,
    q_goal: &Pose,
    params: &VehicleParams,
    cfg: &SimConfig,
) -> Result<TrackingReport, SimError> {
    if path.is_empty() {
        return Err(SimError::EmptyPath);
    }
    let legs = split_legs(path, cfg);
    let rate = cfg.steering_rate(params);
    let delta_max = params.max_steering_angle();
    let l = params.wheelbase;
    let dt = cfg.dt;
    let window_back = (0.5 / cfg.ref_ds).ceil() as usize;
    let window_ahead = (2.0 / cfg.ref_ds).ceil() as usize;

    let mut st = initial;
    let mut t = 0.0;
    let mut trace = Vec::new();
    let mut cross = Vec::new();
    let slew = |delta: f64, target: f64| delta + (target - delta).clamp(-rate * dt, rate * dt);

    for (k, leg) in legs.iter().enumerate() {
        if k > 0 {
            // Stationary steering change at the switch.
            let target = (l * leg.poses[0].kappa).atan().clamp(-delta_max, delta_max);
            let steps = (cfg.switch_pause / dt).round() as usize;
            for _ in 0..steps {
                st.v = 0.0;
                st.delta = slew(st.delta, target);
                t += dt;
                let (_, _, d) = leg.closest(st.x, st.y, 0, 0, window_ahead);
                trace.push(row(t, &st, target, d));
            }
        }
        let end_s = leg.s[leg.s.len() - 1];
        let mut hint = 0;
        loop {
            if t > cfg.max_time {
                break;
            }
            let (i, f, dist) = leg.closest(st.x, st.y, hint, window_back, window_ahead);
            hint = i;
            let (r, s_ref, cap) = leg.reference(i, f);
            if dist > cfg.divergence_limit {
                return Err(SimError::Diverged { t, cross_track: dist });
            }
            let remaining = end_s - s_ref;
            if remaining <= 1e-9 || leg.length() == 0.0 {
                break;
            }
            let v_ref = leg.dir * cap / (1.0 + cfg.curvature_speed_coeff * r.kappa.abs());
            let w_ref = v_ref * r.kappa;
            let (sn, cs) = st.theta.sin_cos();
            let (dx, dy) = (r.x - st.x, r.y - st.y);
            let x_e = cs * dx + sn * dy;
            let y_e = -sn * dx + cs * dy;
            let th_e = angle_diff(r.theta, st.theta);
            let v_cmd = v_ref * th_e.cos() + cfg.k_x * x_e;
            let w_cmd = w_ref + v_ref * cfg.k_y * y_e + v_ref.abs() * cfg.k_theta * th_e.sin();
            // Keep moving along the leg, never faster than its cap.
            let speed = (leg.dir * v_cmd).clamp(0.05 * cap, cap);
            let kappa_cmd = w_cmd / (leg.dir * speed);
            let delta_cmd = (l * kappa_cmd).atan().clamp(-delta_max, delta_max);
            st.delta = slew(st.delta, delta_cmd);
            let step = (speed * dt).min(remaining.max(0.0));
            st.v = leg.dir * step / dt;
            let ds = leg.dir * step;
            st.x += ds * st.theta.cos();
            st.y += ds * st.theta.sin();
            st.theta = normalize_angle(st.theta + ds * st.delta.tan() / l);
            t += dt;
            let (_, _, d_after) = leg.closest(st.x, st.y, hint, window_back, window_ahead);
            cross.push((s_ref, d_after));
            trace.push(row(t, &st, delta_cmd, d_after));
            if step >= remaining {
                break;
            }
        }
    }
    st.v = 0.0;
    let (lat, orient) = alignment_errors(&st, q_goal);
    let max_ct = cross.iter().map(|c| c.1).fold(0.0, f64::max);
    let mean_ct = if cross.is_empty() {
        0.0
    } else {
        cross.iter().map(|c| c.1).sum::<f64>() / cross.len() as f64
    };
    Ok(TrackingReport {
        cross_track: cross,
        max_cross_track: max_ct,
        mean_cross_track: mean_ct,
        lateral_alignment_error: lat,
        orientation_alignment_error: orient,
        trace,
        final_state: st,
        duration: t,
    })
}

fn row(t: f64, st: &VehicleState, delta_cmd: f64, cross_track: f64) -> TraceRow {
    TraceRow {
        t,
        x: st.x,
        y: st.y,
        theta: st.theta,
        delta_cmd,
        delta: st.delta,
        v: st.v,
        cross_track,
    }
}
