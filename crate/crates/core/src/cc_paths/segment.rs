use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::fresnel::{clothoid_integrals, fresnel};
use crate::geometry::Pose;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentKind {
    Straight,
    Clothoid,
    Arc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    pub fn from_sign(s: f64) -> Self {
        if s < 0.0 {
            Direction::Backward
        } else {
            Direction::Forward
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ClothoidError {
    #[error("sharpness must be non-zero; use a straight segment instead")]
    ZeroSharpness,
    #[error("target curvature and sharpness must share a sign")]
    SignMismatch,
}

/// One geometric primitive driven in a single direction.
///
/// Curvature along the segment is `start_kappa + sigma·s`; `sigma` is zero for
/// straights and arcs. `start.kappa` always equals `start_kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSegment {
    pub kind: SegmentKind,
    pub length: f64,
    pub start_kappa: f64,
    pub sigma: f64,
    pub direction: Direction,
    pub start: Pose,
}

impl PathSegment {
    pub fn straight(start: Pose, length: f64, direction: Direction) -> Self {
        Self {
            kind: SegmentKind::Straight,
            length,
            start_kappa: 0.0,
            sigma: 0.0,
            direction,
            start: start.with_kappa(0.0),
        }
    }

    pub fn arc(start: Pose, kappa: f64, length: f64, direction: Direction) -> Self {
        Self {
            kind: SegmentKind::Arc,
            length,
            start_kappa: kappa,
            sigma: 0.0,
            direction,
            start: start.with_kappa(kappa),
        }
    }

    pub fn clothoid(start: Pose, kappa0: f64, sigma: f64, length: f64, direction: Direction) -> Self {
        Self {
            kind: SegmentKind::Clothoid,
            length,
            start_kappa: kappa0,
            sigma,
            direction,
            start: start.with_kappa(kappa0),
        }
    }

    pub fn kappa_at(&self, s: f64) -> f64 {
        self.start_kappa + self.sigma * s
    }

    pub fn end_kappa(&self) -> f64 {
        self.kappa_at(self.length)
    }

    /// Pose after driving `s` meters along the segment (`0 ≤ s ≤ length`).
    pub fn pose_at(&self, s: f64) -> Pose {
        let d = self.direction.sign();
        let p = &self.start;
        let k0 = self.start_kappa;
        let theta = p.theta + d * (k0 * s + 0.5 * self.sigma * s * s);
        let (dx, dy) = match self.kind {
            SegmentKind::Straight | SegmentKind::Arc => {
                // Chord of a constant-curvature piece: s·sinc(Δθ/2) along the mid heading.
                let half = 0.5 * d * k0 * s;
                let chord = s * sinc(half);
                let mid = p.theta + half;
                (chord * mid.cos(), chord * mid.sin())
            }
            SegmentKind::Clothoid => clothoid_integrals(p.theta, d * k0, 0.5 * d * self.sigma, s),
        };
        Pose::new(p.x + d * dx, p.y + d * dy, theta, self.kappa_at(s))
    }

    pub fn end_pose(&self) -> Pose {
        self.pose_at(self.length)
    }

    /// Poses at `0, ds, 2ds, …` and always at `length`.
    pub fn sample(&self, ds: f64) -> Vec<(f64, Pose)> {
        stations(self.length, ds)
            .into_iter()
            .map(|s| (s, self.pose_at(s)))
            .collect()
    }

    /// The same curve driven in the opposite direction, from its end to its start.
    pub fn reversed(&self) -> Self {
        Self {
            kind: self.kind,
            length: self.length,
            start_kappa: self.end_kappa(),
            sigma: -self.sigma,
            direction: self.direction.opposite(),
            start: self.end_pose(),
        }
    }

    pub fn truncated(&self, length: f64) -> Self {
        Self {
            length: length.clamp(0.0, self.length),
            ..*self
        }
    }

    /// Heading change `θ(end) − θ(start)` without wrapping.
    pub fn heading_change(&self) -> f64 {
        self.direction.sign() * (self.start_kappa * self.length + 0.5 * self.sigma * self.length * self.length)
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Arc-length stations `0, ds, 2ds, …, length`, the last one always present.
pub fn stations(length: f64, ds: f64) -> Vec<f64> {
    assert!(ds > 0.0, "sampling step must be positive");
    let mut out = Vec::with_capacity((length / ds) as usize + 2);
    let mut k = 0usize;
    loop {
        let s = k as f64 * ds;
        if s >= length - 1e-9 * ds.max(1.0) {
            break;
        }
        out.push(s);
        k += 1;
    }
    out.push(length);
    out
}

/// Pose reached from the origin by a clothoid of sharpness `sigma` starting at
/// zero curvature and driven until the curvature equals `kappa_target`.
///
/// Position follows the scaled Fresnel integrals
/// `x = √(π/σ)·C(κ/√(πσ))`, `y = √(π/σ)·S(κ/√(πσ))`, heading `κ²/(2σ)`;
/// negative sharpness mirrors `y` and `θ`.
pub fn clothoid_endpoint(sigma: f64, kappa_target: f64) -> Result<Pose, ClothoidError> {
    if sigma == 0.0 {
        return Err(ClothoidError::ZeroSharpness);
    }
    if kappa_target == 0.0 {
        return Ok(Pose::identity());
    }
    if sigma.signum() != kappa_target.signum() {
        return Err(ClothoidError::SignMismatch);
    }
    let mirror = sigma.signum();
    let sg = sigma.abs();
    let k = kappa_target.abs();
    let scale = (std::f64::consts::PI / sg).sqrt();
    let (c, s) = fresnel((k * k / (std::f64::consts::PI * sg)).sqrt());
    Ok(Pose::new(
        scale * c,
        mirror * scale * s,
        mirror * k * k / (2.0 * sg),
        kappa_target,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn straight_sampling() {
        let seg = PathSegment::straight(Pose::identity(), 2.0, Direction::Forward);
        let samples = seg.sample(1.0);
        assert_eq!(samples.len(), 3);
        for (i, (s, p)) in samples.iter().enumerate() {
            assert_eq!(*s, i as f64);
            assert!((p.x - i as f64).abs() < 1e-15 && p.y == 0.0 && p.theta == 0.0);
        }
    }

    #[test]
    fn quarter_arc_heading() {
        let seg = PathSegment::arc(Pose::identity(), 1.0 / 6.0, 6.0 * FRAC_PI_2, Direction::Forward);
        let end = seg.end_pose();
        assert!((end.theta - FRAC_PI_2).abs() < 1e-12);
        assert!((end.x - 6.0).abs() < 1e-12 && (end.y - 6.0).abs() < 1e-12);
    }

    #[test]
    fn backward_straight_moves_behind() {
        let seg = PathSegment::straight(Pose::new(1.0, 1.0, FRAC_PI_2, 0.0), 2.0, Direction::Backward);
        let end = seg.end_pose();
        assert!((end.x - 1.0).abs() < 1e-12 && (end.y + 1.0).abs() < 1e-12);
    }

    #[test]
    fn clothoid_endpoint_reference_case() {
        let p = clothoid_endpoint(0.2, 1.0 / 6.0).unwrap();
        // Reference from 30-digit quadrature of the heading integrand.
        assert!((p.x - 0.832_931_545_476_656).abs() < 1e-12);
        assert!((p.y - 0.019_283_479_675_185_6).abs() < 1e-12);
        assert!((p.theta - (1.0f64 / 36.0) / 0.4).abs() < 1e-15);
        let m = clothoid_endpoint(-0.2, -1.0 / 6.0).unwrap();
        assert_eq!((m.x, m.y, m.theta, m.kappa), (p.x, -p.y, -p.theta, -p.kappa));
    }

    #[test]
    fn clothoid_endpoint_errors_and_limit() {
        assert_eq!(clothoid_endpoint(0.0, 0.1), Err(ClothoidError::ZeroSharpness));
        assert_eq!(clothoid_endpoint(0.2, -0.1), Err(ClothoidError::SignMismatch));
        let p = clothoid_endpoint(0.2, 1e-9).unwrap();
        assert!(p.x.abs() < 1e-8 && p.y.abs() < 1e-20 && p.theta.abs() < 1e-17);
    }

    #[test]
    fn clothoid_segment_matches_endpoint_formula() {
        let seg = PathSegment::clothoid(Pose::identity(), 0.0, 0.2, (1.0 / 6.0) / 0.2, Direction::Forward);
        let last = seg.sample(0.05).last().unwrap().1;
        let closed = clothoid_endpoint(0.2, 1.0 / 6.0).unwrap();
        assert!(last.distance_xy(&closed) < 1e-9);
        assert!((last.theta - closed.theta).abs() < 1e-9);
        assert!((last.kappa - closed.kappa).abs() < 1e-12);
    }

    #[test]
    fn reversal_retraces_the_curve() {
        let seg = PathSegment::clothoid(Pose::new(1.0, 2.0, 0.4, 0.05), 0.05, -0.2, 1.1, Direction::Backward);
        let rev = seg.reversed();
        assert_eq!(rev.direction, Direction::Forward);
        assert!(rev.end_pose().approx_eq(&seg.start, 1e-12));
        assert!((rev.end_kappa() - seg.start_kappa).abs() < 1e-15);
        for s in [0.0, 0.3, 0.7, 1.1] {
            let a = seg.pose_at(s);
            let b = rev.pose_at(1.1 - s);
            assert!(a.approx_eq(&b, 1e-12));
        }
    }
}
