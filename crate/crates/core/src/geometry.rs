//! Planar poses, vehicle parameters and footprint geometry.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::ValidationError;

/// A point in the plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Point) -> f64 {
        (self - o).norm()
    }
}

impl Add for Point {
    type Output = Point;

    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

/// Wraps an angle into (−π, π].
pub fn normalize_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let n = a.rem_euclid(TAU);
    if n > PI {
        n - TAU
    } else {
        n
    }
}

/// Shortest signed difference `a − b`, in (−π, π].
pub fn angle_diff(a: f64, b: f64) -> f64 {
    normalize_angle(a - b)
}

/// Planar configuration of the rear-axle center with signed path curvature.
///
/// `kappa` is the steering curvature `tan(δ)/L`; it keeps its sign when the
/// vehicle drives the same curve backward.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub kappa: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64, kappa: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
            kappa,
        }
    }

    pub const fn identity() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            theta: 0.0,
            kappa: 0.0,
        }
    }

    pub fn with_kappa(self, kappa: f64) -> Self {
        Self { kappa, ..self }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn distance_xy(&self, other: &Pose) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Position and heading agree within `tol` (meters / radians).
    pub fn approx_eq(&self, other: &Pose, tol: f64) -> bool {
        self.distance_xy(other) <= tol && angle_diff(self.theta, other.theta).abs() <= tol
    }

    /// Maps a point given in this pose's frame into the world frame.
    pub fn transform_point(&self, p: Point) -> Point {
        let (s, c) = self.theta.sin_cos();
        Point::new(self.x + c * p.x - s * p.y, self.y + s * p.x + c * p.y)
    }

    /// Maps a world point into this pose's frame.
    pub fn inverse_transform_point(&self, p: Point) -> Point {
        let (s, c) = self.theta.sin_cos();
        let dx = p.x - self.x;
        let dy = p.y - self.y;
        Point::new(c * dx + s * dy, -s * dx + c * dy)
    }
}

/// Expresses `local` (given in the frame of `base`) in the world frame.
/// Curvature is taken from `local`.
pub fn compose(base: Pose, local: Pose) -> Pose {
    let p = base.transform_point(local.position());
    Pose::new(p.x, p.y, base.theta + local.theta, local.kappa)
}

/// Inverse of [`compose`]: expresses the world pose `world` in the frame of `base`.
pub fn relative(base: Pose, world: Pose) -> Pose {
    let p = base.inverse_transform_point(world.position());
    Pose::new(p.x, p.y, world.theta - base.theta, world.kappa)
}

/// Vehicle dimensions and curvature limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleParams {
    #[serde(rename = "wheelbase_L")]
    pub wheelbase: f64,
    pub body_length: f64,
    pub body_width: f64,
    /// Rear axle to rear bumper.
    pub rear_overhang: f64,
    pub kappa_max: f64,
    pub sigma_max: f64,
}

impl Default for VehicleParams {
    /// The experimental sedan: 4.910 m × 1.860 m, wheelbase 2.845 m,
    /// minimum turning radius 6 m, sharpness 0.2 m⁻².
    fn default() -> Self {
        Self {
            wheelbase: 2.845,
            body_length: 4.910,
            body_width: 1.860,
            rear_overhang: 1.03,
            kappa_max: 1.0 / 6.0,
            sigma_max: 0.2,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<(), ValidationError> {
        let fields = [
            ("wheelbase_L", self.wheelbase),
            ("body_length", self.body_length),
            ("body_width", self.body_width),
            ("rear_overhang", self.rear_overhang),
            ("kappa_max", self.kappa_max),
            ("sigma_max", self.sigma_max),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(ValidationError::new(
                    format!("vehicle.{name}"),
                    "must be finite and strictly positive",
                ));
            }
        }
        if self.rear_overhang >= self.body_length {
            return Err(ValidationError::new(
                "vehicle.rear_overhang",
                "must be smaller than body_length",
            ));
        }
        Ok(())
    }

    /// Largest front-wheel angle, `atan(κ_max·L)`.
    pub fn max_steering_angle(&self) -> f64 {
        (self.kappa_max * self.wheelbase).atan()
    }

    pub fn footprint(&self) -> Footprint {
        Footprint::new(self)
    }
}

/// Body rectangle in the vehicle frame (rear-axle origin, x forward).
/// Corners are ordered counter-clockwise starting at rear-right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    pub corners: [Point; 4],
}

impl Footprint {
    pub fn new(params: &VehicleParams) -> Self {
        let rear = -params.rear_overhang;
        let front = params.body_length - params.rear_overhang;
        let half = 0.5 * params.body_width;
        Self {
            corners: [
                Point::new(rear, -half),
                Point::new(front, -half),
                Point::new(front, half),
                Point::new(rear, half),
            ],
        }
    }

    pub fn at(&self, pose: &Pose) -> [Point; 4] {
        self.corners.map(|c| pose.transform_point(c))
    }
}

/// World-frame corners of the body when the rear axle center is at `pose`.
pub fn footprint_at(params: &VehicleParams, pose: &Pose) -> [Point; 4] {
    Footprint::new(params).at(pose)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shoelace(p: &[Point]) -> f64 {
        let n = p.len();
        0.5 * (0..n).map(|i| p[i].cross(p[(i + 1) % n])).sum::<f64>()
    }

    #[test]
    fn compose_identity_cases() {
        let p = Pose::new(1.5, -2.0, 0.7, 0.1);
        let a = compose(Pose::identity(), p);
        assert!(a.approx_eq(&p, 1e-12) && a.kappa == p.kappa);
        let b = compose(p, Pose::identity());
        assert!(b.approx_eq(&p, 1e-12));
        assert_eq!(b.kappa, 0.0);
    }

    #[test]
    fn compose_quarter_turn() {
        let r = compose(Pose::new(1.0, 0.0, PI / 2.0, 0.0), Pose::new(1.0, 0.0, 0.0, 0.0));
        assert!((r.x - 1.0).abs() < 1e-12);
        assert!((r.y - 1.0).abs() < 1e-12);
        assert!((r.theta - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_keeps_pi_and_maps_minus_pi() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-12);
    }

    #[test]
    fn footprint_at_origin_table_dimensions() {
        let params = VehicleParams {
            rear_overhang: 1.0,
            ..VehicleParams::default()
        };
        let c = footprint_at(&params, &Pose::identity());
        let xs: Vec<f64> = c.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = c.iter().map(|p| p.y).collect();
        let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((min(&xs) + 1.0).abs() < 1e-12);
        assert!((max(&xs) - 3.91).abs() < 1e-12);
        assert!((min(&ys) + 0.93).abs() < 1e-12);
        assert!((max(&ys) - 0.93).abs() < 1e-12);
    }

    #[test]
    fn footprint_rotated_by_pi_negates_corners() {
        let params = VehicleParams::default();
        let pose = Pose::new(3.0, 4.0, 0.3, 0.0);
        let flipped = Pose::new(3.0, 4.0, 0.3 + PI, 0.0);
        let a = footprint_at(&params, &pose);
        let b = footprint_at(&params, &flipped);
        for (pa, pb) in a.iter().zip(b.iter()) {
            assert!((pa.x - 3.0 + pb.x - 3.0).abs() < 1e-12);
            assert!((pa.y - 4.0 + pb.y - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn vehicle_validation() {
        assert!(VehicleParams::default().validate().is_ok());
        let bad = VehicleParams {
            rear_overhang: 5.0,
            ..VehicleParams::default()
        };
        let err = bad.validate().unwrap_err();
        assert!(err.to_string().contains("rear_overhang"));
        let bad = VehicleParams {
            sigma_max: 0.0,
            ..VehicleParams::default()
        };
        assert!(bad.validate().unwrap_err().to_string().contains("sigma_max"));
    }

    fn pose_strategy() -> impl Strategy<Value = Pose> {
        (-50.0..50.0f64, -50.0..50.0f64, -10.0..10.0f64, -0.2..0.2f64).prop_map(|(x, y, t, k)| Pose::new(x, y, t, k))
    }

    proptest! {
        #[test]
        fn normalization_range_and_trig(a in -1.0e3..1.0e3f64) {
            let n = normalize_angle(a);
            prop_assert!(n > -PI && n <= PI);
            prop_assert!((n.sin() - a.sin()).abs() < 1e-12);
            prop_assert!((n.cos() - a.cos()).abs() < 1e-12);
        }

        #[test]
        fn compose_is_associative(a in pose_strategy(), b in pose_strategy(), c in pose_strategy()) {
            let l = compose(compose(a, b), c);
            let r = compose(a, compose(b, c));
            prop_assert!(l.distance_xy(&r) < 1e-9);
            prop_assert!(angle_diff(l.theta, r.theta).abs() < 1e-12);
        }

        #[test]
        fn relative_inverts_compose(a in pose_strategy(), b in pose_strategy()) {
            let w = compose(a, b);
            let back = relative(a, w);
            prop_assert!(back.approx_eq(&b, 1e-9));
        }

        #[test]
        fn footprint_is_rigid(p in pose_strategy()) {
            let params = VehicleParams::default();
            let base = footprint_at(&params, &Pose::identity());
            let moved = footprint_at(&params, &p);
            for i in 0..4 {
                for j in 0..4 {
                    let d0 = base[i].distance(base[j]);
                    let d1 = moved[i].distance(moved[j]);
                    prop_assert!((d0 - d1).abs() < 1e-9);
                }
            }
            let area = shoelace(&moved);
            prop_assert!((area - params.body_length * params.body_width).abs() < 1e-9);
        }
    }
}
