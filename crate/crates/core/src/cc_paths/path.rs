use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::segment::{stations, Direction, PathSegment, SegmentKind};
use crate::geometry::{angle_diff, Pose, VehicleParams};

/// Segments shorter than this are dropped when building paths.
pub const MIN_SEGMENT_LENGTH: f64 = 1e-10;

/// An ordered chain of segments.
///
/// `tree_suffix_from` marks the arc length where a planned parking path leaves
/// the sampled tree and follows a target-tree branch; it only affects speed
/// limits during tracking.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub segments: Vec<PathSegment>,
    pub tree_suffix_from: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub s: f64,
    pub pose: Pose,
    pub direction: Direction,
    pub segment: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathViolation {
    #[error("joint {index}: segments do not meet (gap {gap:.3e} m, heading {heading:.3e} rad)")]
    Gap { index: usize, gap: f64, heading: f64 },
    #[error("joint {index}: curvature jumps by {jump:.3e} without a direction switch")]
    CurvatureJump { index: usize, jump: f64 },
    #[error("curvature {kappa:.6} exceeds the limit at s = {s:.3}")]
    CurvatureLimit { s: f64, kappa: f64 },
    #[error("sharpness {sigma:.6} exceeds the limit in segment {index}")]
    SharpnessLimit { index: usize, sigma: f64 },
    #[error("curvature changes by {dk:.3e} over {ds:.3e} m at s = {s:.3}")]
    CurvatureRate { s: f64, dk: f64, ds: f64 },
}

impl Path {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_segments(segments: impl IntoIterator<Item = PathSegment>) -> Self {
        let mut p = Path::new();
        for s in segments {
            p.push(s);
        }
        p
    }

    /// Appends a segment, skipping degenerate ones.
    pub fn push(&mut self, seg: PathSegment) {
        if seg.length > MIN_SEGMENT_LENGTH {
            self.segments.push(seg);
        }
    }

    pub fn extend(&mut self, other: &Path) {
        for s in &other.segments {
            self.push(*s);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    pub fn start_pose(&self) -> Option<Pose> {
        self.segments.first().map(|s| s.start)
    }

    pub fn end_pose(&self) -> Option<Pose> {
        self.segments.last().map(|s| s.end_pose())
    }

    /// Number of driving-direction changes between consecutive segments.
    pub fn direction_switches(&self) -> usize {
        self.segments
            .windows(2)
            .filter(|w| w[0].direction != w[1].direction)
            .count()
    }

    /// The same path driven end to start.
    pub fn reversed(&self) -> Path {
        Path {
            segments: self.segments.iter().rev().map(|s| s.reversed()).collect(),
            tree_suffix_from: None,
        }
    }

    /// Prefix of arc length `len`.
    pub fn truncated(&self, len: f64) -> Path {
        let mut out = Path::new();
        let mut acc = 0.0;
        for seg in &self.segments {
            if acc + seg.length <= len {
                out.push(*seg);
                acc += seg.length;
            } else {
                out.push(seg.truncated(len - acc));
                break;
            }
        }
        out
    }

    pub fn pose_at(&self, s: f64) -> Option<Pose> {
        let mut acc = 0.0;
        for seg in &self.segments {
            if s <= acc + seg.length {
                return Some(seg.pose_at((s - acc).max(0.0)));
            }
            acc += seg.length;
        }
        self.end_pose()
    }

    /// Merges consecutive straights driven the same way.
    pub fn simplified(&self) -> Path {
        let mut out: Vec<PathSegment> = Vec::with_capacity(self.segments.len());
        for seg in &self.segments {
            if let Some(last) = out.last_mut() {
                if last.kind == SegmentKind::Straight
                    && seg.kind == SegmentKind::Straight
                    && last.direction == seg.direction
                {
                    last.length += seg.length;
                    continue;
                }
            }
            if seg.length > MIN_SEGMENT_LENGTH {
                out.push(*seg);
            }
        }
        Path {
            segments: out,
            tree_suffix_from: self.tree_suffix_from,
        }
    }

    /// Samples every segment at step `ds`. A segment's first sample is omitted
    /// when it continues the previous segment in the same direction, so
    /// consecutive samples only repeat a position at direction switches.
    pub fn sample(&self, ds: f64) -> Vec<PathSample> {
        let mut out = Vec::new();
        let mut acc = 0.0;
        for (i, seg) in self.segments.iter().enumerate() {
            let skip_first = i > 0 && self.segments[i - 1].direction == seg.direction;
            for (j, s) in stations(seg.length, ds).into_iter().enumerate() {
                if j == 0 && skip_first {
                    continue;
                }
                out.push(PathSample {
                    s: acc + s,
                    pose: seg.pose_at(s),
                    direction: seg.direction,
                    segment: i,
                });
            }
            acc += seg.length;
        }
        out
    }

    /// Structural and curvature validity.
    ///
    /// Joints must meet within `joint_tol`; curvature must be continuous except
    /// at direction switches; `|κ| ≤ κ_max`, `|σ| ≤ σ_max`; a sample scan at
    /// step `ds` must show `|Δκ| ≤ σ_max·Δs + 1e−6` within each direction.
    pub fn validate(&self, params: &VehicleParams, ds: f64, joint_tol: f64) -> Result<(), PathViolation> {
        for (i, w) in self.segments.windows(2).enumerate() {
            let end = w[0].end_pose();
            let gap = end.distance_xy(&w[1].start);
            let heading = angle_diff(end.theta, w[1].start.theta).abs();
            if gap > joint_tol || heading > joint_tol {
                return Err(PathViolation::Gap {
                    index: i + 1,
                    gap,
                    heading,
                });
            }
            if w[0].direction == w[1].direction {
                let jump = (w[0].end_kappa() - w[1].start_kappa).abs();
                if jump > 1e-9 {
                    return Err(PathViolation::CurvatureJump { index: i + 1, jump });
                }
            }
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.sigma.abs() > params.sigma_max * (1.0 + 1e-9) {
                return Err(PathViolation::SharpnessLimit {
                    index: i,
                    sigma: seg.sigma,
                });
            }
        }
        check_curvature_profile(&self.sample(ds), params)
    }
}

/// Scan of consecutive samples: `|κ| ≤ κ_max + 1e−9` everywhere and
/// `|Δκ| ≤ σ_max·Δs + 1e−6` between samples of the same driving direction.
pub fn check_curvature_profile(samples: &[PathSample], params: &VehicleParams) -> Result<(), PathViolation> {
    for s in samples {
        if s.pose.kappa.abs() > params.kappa_max + 1e-9 {
            return Err(PathViolation::CurvatureLimit {
                s: s.s,
                kappa: s.pose.kappa,
            });
        }
    }
    for w in samples.windows(2) {
        if w[0].direction != w[1].direction {
            continue;
        }
        let ds = (w[1].s - w[0].s).abs();
        let dk = (w[1].pose.kappa - w[0].pose.kappa).abs();
        if dk > params.sigma_max * ds + 1e-6 {
            return Err(PathViolation::CurvatureRate { s: w[0].s, dk, ds });
        }
    }
    Ok(())
}

pub fn path_length(p: &Path) -> f64 {
    p.length()
}

/// `(s, κ)` pairs at step `ds`.
pub fn path_curvature_profile(p: &Path, ds: f64) -> Vec<(f64, f64)> {
    p.sample(ds).into_iter().map(|s| (s.s, s.pose.kappa)).collect()
}
