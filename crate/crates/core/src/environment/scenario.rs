use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use super::collision::CollisionChecker;
use super::polygon::{Aabb, ConvexPolygon};
use crate::error::{ScenarioError, ValidationError};
use crate::geometry::{Point, Pose, VehicleParams};
use crate::planner::PlannerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParkingMode {
    Perpendicular,
    Parallel,
}

/// The parking spot. `goal` is the rear-axle pose of the parked vehicle; its
/// heading points out of the spot, toward the road.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParkingSpot {
    pub goal: Pose,
    pub length: f64,
    pub width: f64,
    pub mode: ParkingMode,
}

impl ParkingSpot {
    /// Spot outline, centered on the parked body.
    pub fn outline(&self, params: &VehicleParams) -> [Point; 4] {
        let cx = 0.5 * params.body_length - params.rear_overhang;
        let (hl, hw) = (0.5 * self.length, 0.5 * self.width);
        [
            Point::new(cx - hl, -hw),
            Point::new(cx + hl, -hw),
            Point::new(cx + hl, hw),
            Point::new(cx - hl, hw),
        ]
        .map(|p| self.goal.transform_point(p))
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub bounds: Aabb,
    pub obstacles: Vec<ConvexPolygon>,
    pub spot: ParkingSpot,
    pub start: Pose,
    pub vehicle: VehicleParams,
    pub planner: PlannerConfig,
    pub seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpotDoc {
    goal: [f64; 3],
    length: f64,
    width: f64,
    mode: ParkingMode,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    bounds: [f64; 4],
    obstacles: Vec<Vec<[f64; 2]>>,
    spot: SpotDoc,
    start: [f64; 3],
    vehicle: VehicleParams,
    #[serde(default)]
    planner: PlannerConfig,
    seed: u64,
}

fn pose3(v: [f64; 3]) -> Pose {
    Pose::new(v[0], v[1], v[2], 0.0)
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            match missing_field(&msg) {
                Some(field) => ScenarioError::Validation(ValidationError::new(field, "missing")),
                None => ScenarioError::from(e),
            }
        })?;
        let [x0, y0, x1, y1] = doc.bounds;
        if !(x0.is_finite() && y0.is_finite() && x1.is_finite() && y1.is_finite() && x1 > x0 && y1 > y0) {
            return Err(ValidationError::new("bounds", "must be [xmin, ymin, xmax, ymax] with max > min").into());
        }
        let mut obstacles = Vec::with_capacity(doc.obstacles.len());
        for (i, poly) in doc.obstacles.into_iter().enumerate() {
            let pts = poly.into_iter().map(|[x, y]| Point::new(x, y)).collect();
            let p = ConvexPolygon::new(pts).map_err(|e| ValidationError::new(format!("obstacles[{i}]"), e.reason))?;
            obstacles.push(p);
        }
        let scn = Scenario {
            bounds: Aabb::new(x0, y0, x1, y1),
            obstacles,
            spot: ParkingSpot {
                goal: pose3(doc.spot.goal),
                length: doc.spot.length,
                width: doc.spot.width,
                mode: doc.spot.mode,
            },
            start: pose3(doc.start),
            vehicle: doc.vehicle,
            planner: doc.planner,
            seed: doc.seed,
        };
        scn.validate()?;
        Ok(scn)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| ScenarioError::Io {
            path: path.as_ref().display().to_string(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let doc = ScenarioDoc {
            bounds: [
                self.bounds.min_x,
                self.bounds.min_y,
                self.bounds.max_x,
                self.bounds.max_y,
            ],
            obstacles: self
                .obstacles
                .iter()
                .map(|o| o.vertices().iter().map(|p| [p.x, p.y]).collect())
                .collect(),
            spot: SpotDoc {
                goal: [self.spot.goal.x, self.spot.goal.y, self.spot.goal.theta],
                length: self.spot.length,
                width: self.spot.width,
                mode: self.spot.mode,
            },
            start: [self.start.x, self.start.y, self.start.theta],
            vehicle: self.vehicle,
            planner: self.planner,
            seed: self.seed,
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        self.vehicle.validate()?;
        self.planner.validate()?;
        let finite = |p: &Pose| p.x.is_finite() && p.y.is_finite() && p.theta.is_finite();
        if !finite(&self.start) || !self.bounds.contains(self.start.position()) {
            return Err(ValidationError::new("start", "must lie inside bounds"));
        }
        if !finite(&self.spot.goal) || !self.bounds.contains(self.spot.goal.position()) {
            return Err(ValidationError::new("spot.goal", "must lie inside bounds"));
        }
        if !(self.spot.length.is_finite() && self.spot.length > 0.0) {
            return Err(ValidationError::new("spot.length", "must be positive"));
        }
        if !(self.spot.width.is_finite() && self.spot.width > 0.0) {
            return Err(ValidationError::new("spot.width", "must be positive"));
        }
        Ok(())
    }

    /// Obstacles grown by the configured inflation margin.
    pub fn effective_obstacles(&self) -> Vec<ConvexPolygon> {
        self.obstacles
            .iter()
            .map(|o| o.inflated(self.planner.inflation_margin))
            .collect()
    }

    pub fn collision_checker(&self) -> CollisionChecker {
        CollisionChecker::new(self.bounds, self.effective_obstacles(), self.planner.cell_size)
    }
}

fn missing_field(msg: &str) -> Option<String> {
    let rest = msg.strip_prefix("missing field `")?;
    let end = rest.find('`')?;
    Some(rest[..end].to_string())
}
