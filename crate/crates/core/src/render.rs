//! Static SVG drawings of scenarios, target trees, RRT trees and paths.

use std::fmt::Write as _;

use crate::cc_paths::{Direction, Path, SegmentKind};
use crate::environment::Scenario;
use crate::geometry::{footprint_at, Point, Pose};
use crate::planner::PlannerTree;
use crate::target_tree::TargetTree;

/// A drawable piece of a branch or path with one primitive type.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub kind: SegmentKind,
}

#[derive(Debug, Clone, Default)]
pub struct RenderInput<'a> {
    pub path: Option<&'a Path>,
    /// Target-tree pieces, from [`tree_polylines`] or [`branch_polylines`].
    pub tree: Vec<Polyline>,
    pub rrt: Option<&'a PlannerTree>,
    /// Spacing of body outlines drawn along the path; `None` draws none.
    pub footprint_every: Option<f64>,
}

const DS: f64 = 0.1;

fn segment_polylines(path: &Path) -> Vec<Polyline> {
    path.segments
        .iter()
        .map(|seg| Polyline {
            points: seg.sample(DS).into_iter().map(|(_, p)| p.position()).collect(),
            kind: seg.kind,
        })
        .collect()
}

/// Branch pieces straight from a built tree.
pub fn tree_polylines(tree: &TargetTree) -> Vec<Polyline> {
    tree.branches.iter().flat_map(|b| segment_polylines(&b.path)).collect()
}

/// Branch pieces recovered from sampled poses: zero curvature is a straight,
/// constant nonzero curvature an arc, anything else a clothoid.
pub fn branch_polylines(branches: &[Vec<Pose>]) -> Vec<Polyline> {
    let classify = |a: &Pose, b: &Pose| {
        if (a.kappa - b.kappa).abs() > 1e-9 {
            SegmentKind::Clothoid
        } else if a.kappa.abs() <= 1e-12 {
            SegmentKind::Straight
        } else {
            SegmentKind::Arc
        }
    };
    let mut out: Vec<Polyline> = Vec::new();
    for poses in branches {
        let mut current: Option<Polyline> = None;
        for w in poses.windows(2) {
            let kind = classify(&w[0], &w[1]);
            match current.as_mut() {
                Some(pl) if pl.kind == kind => pl.points.push(w[1].position()),
                _ => {
                    out.extend(current.take());
                    current = Some(Polyline {
                        points: vec![w[0].position(), w[1].position()],
                        kind,
                    });
                }
            }
        }
        out.extend(current);
    }
    out
}

fn points_attr(pts: &[Point]) -> String {
    let mut s = String::with_capacity(pts.len() * 16);
    for (i, p) in pts.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{:.3},{:.3}", p.x, p.y).unwrap();
    }
    s
}

fn polygon(out: &mut String, pts: &[Point], style: &str) {
    writeln!(out, r#"<polygon points="{}" {style}/>"#, points_attr(pts)).unwrap();
}

fn polyline(out: &mut String, pts: &[Point], style: &str) {
    writeln!(out, r#"<polyline points="{}" fill="none" {style}/>"#, points_attr(pts)).unwrap();
}

fn kind_style(kind: SegmentKind) -> &'static str {
    match kind {
        SegmentKind::Straight => r##"stroke="#2a7f3f" stroke-width="0.06""##,
        SegmentKind::Clothoid => r##"stroke="#d08a00" stroke-width="0.06" stroke-dasharray="0.25 0.12""##,
        SegmentKind::Arc => r##"stroke="#7b3fb5" stroke-width="0.06""##,
    }
}

/// Scenario drawing in meters with y up, 1 m grid.
pub fn render_svg(scn: &Scenario, input: &RenderInput) -> String {
    let b = scn.bounds;
    let (w, h) = (b.width(), b.height());
    let px_per_m = 30.0;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="{} {} {} {}">"#,
        w * px_per_m,
        h * px_per_m,
        b.min_x,
        -b.max_y,
        w,
        h
    )
    .unwrap();
    out.push_str("<g transform=\"scale(1,-1)\">\n");
    writeln!(
        out,
        r##"<rect x="{}" y="{}" width="{w}" height="{h}" fill="#ffffff" stroke="#000000" stroke-width="0.05"/>"##,
        b.min_x, b.min_y
    )
    .unwrap();

    out.push_str("<g id=\"grid\" stroke=\"#e4e4e4\" stroke-width=\"0.02\">\n");
    let mut x = b.min_x.ceil();
    while x <= b.max_x {
        writeln!(out, r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}"/>"#, b.min_y, b.max_y).unwrap();
        x += 1.0;
    }
    let mut y = b.min_y.ceil();
    while y <= b.max_y {
        writeln!(out, r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}"/>"#, b.min_x, b.max_x).unwrap();
        y += 1.0;
    }
    out.push_str("</g>\n");

    out.push_str("<g id=\"obstacles\">\n");
    for ob in &scn.obstacles {
        polygon(
            &mut out,
            ob.vertices(),
            r##"fill="#8c8c8c" stroke="#404040" stroke-width="0.03""##,
        );
    }
    out.push_str("</g>\n");

    out.push_str("<g id=\"spot\">\n");
    polygon(
        &mut out,
        &scn.spot.outline(&scn.vehicle),
        r##"fill="none" stroke="#1f5fbf" stroke-width="0.05" stroke-dasharray="0.3 0.15""##,
    );
    out.push_str("</g>\n");

    if let Some(rrt) = input.rrt {
        out.push_str("<g id=\"rrt\" stroke=\"#b0c4de\" stroke-width=\"0.025\">\n");
        for node in rrt.nodes().iter().skip(1) {
            let pts: Vec<Point> = node.edge.sample(0.25).iter().map(|s| s.pose.position()).collect();
            polyline(&mut out, &pts, "");
        }
        out.push_str("</g>\n");
    }

    if !input.tree.is_empty() {
        out.push_str("<g id=\"target-tree\">\n");
        for pl in &input.tree {
            let class = match pl.kind {
                SegmentKind::Straight => "straight",
                SegmentKind::Clothoid => "clothoid",
                SegmentKind::Arc => "arc",
            };
            polyline(
                &mut out,
                &pl.points,
                &format!(r#"class="{class}" {}"#, kind_style(pl.kind)),
            );
        }
        out.push_str("</g>\n");
    }

    if let Some(path) = input.path {
        out.push_str("<g id=\"path\">\n");
        for seg in &path.segments {
            let pts: Vec<Point> = seg.sample(DS).into_iter().map(|(_, p)| p.position()).collect();
            let color = match seg.direction {
                Direction::Forward => "#d62728",
                Direction::Backward => "#1f77b4",
            };
            polyline(&mut out, &pts, &format!(r#"stroke="{color}" stroke-width="0.08""#));
        }
        if let Some(step) = input.footprint_every.filter(|s| *s > 0.0) {
            let mut s = 0.0;
            while s <= path.length() {
                if let Some(p) = path.pose_at(s) {
                    polygon(
                        &mut out,
                        &footprint_at(&scn.vehicle, &p),
                        r##"fill="none" stroke="#555555" stroke-width="0.02""##,
                    );
                }
                s += step;
            }
        }
        out.push_str("</g>\n");
    }

    out.push_str("<g id=\"poses\">\n");
    polygon(
        &mut out,
        &footprint_at(&scn.vehicle, &scn.start),
        r##"fill="#2ca02c" fill-opacity="0.3" stroke="#2ca02c" stroke-width="0.04""##,
    );
    polygon(
        &mut out,
        &footprint_at(&scn.vehicle, &scn.spot.goal),
        r##"fill="#ff7f0e" fill-opacity="0.3" stroke="#ff7f0e" stroke-width="0.04""##,
    );
    out.push_str("</g>\n</g>\n</svg>\n");
    out
}
